#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "iccscan/ast.hpp"

namespace iccscan {

/// Mitigation tip reported for unrestricted sendBroadcast calls.
inline constexpr std::string_view kSendBroadcastTip =
    "Leak: Send Broadcast leaking information to all the apps. Compliant "
    "solution requires usage of LocalBroadcastManager or sendBroadcast with "
    "custom permissions.";

/// Source, sensitive-source and sink vocabulary. Types and methods are
/// matched by simple (unqualified) name.
struct TaintConfig {
  std::set<std::string> sources;
  std::set<std::string> sensitive_sources;
  std::set<std::string> sinks;
  /// Receivers whose broadcasts stay inside the sending app.
  std::set<std::string> local_broadcast_types;
  /// Full leak message per sink, rendered verbatim.
  std::map<std::string, std::string> mitigation_tips;

  /// Tip for `sink`; throws std::out_of_range for unknown sinks.
  const std::string& tip(const std::string& sink) const {
    return mitigation_tips.at(sink);
  }

  friend bool operator==(const TaintConfig&, const TaintConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string key, const std::string& what)
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}

  /// 1-based line in the config file, 0 for whole-config problems.
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

TaintConfig default_config();

/// default_config() overlaid with the entries of a config file.
///
/// The format is line oriented; `#` starts a comment:
///
///     sources = Intent
///     sensitive_sources += CarSensorManager
///     sinks += sendOrderedBroadcast, sendStickyBroadcast
///     local_broadcast_types = LocalBroadcastManager
///     tip.sendOrderedBroadcast = Leak: ordered broadcast reaches all apps.
///
/// `=` replaces a set, `+=` adds to it, `-=` removes from it. Values are
/// separated by commas or whitespace. Sinks without a `tip.` entry get a
/// generated tip. Throws ConfigError for malformed lines, unknown keys,
/// tips for unknown sinks and overlapping source sets.
TaintConfig load_config(const std::filesystem::path& path);

/// Same as load_config() on in-memory text; `origin` names the input in
/// error messages.
TaintConfig parse_config(std::string_view text,
                         std::string_view origin = "<config>");

/// Serializes a config so that parse_config(write_config(c)) == c.
std::string write_config(const TaintConfig& config);

/// Throws ConfigError when sources and sensitive sources overlap or a sink
/// has no tip.
void validate(const TaintConfig& config);

enum class SinkDecision { Sink, ExemptPermission, ExemptLocal, NotSink };

/// Declared simple type per variable name, used to recognize local
/// broadcast receivers held in variables.
using LocalTypes = std::map<std::string, std::string, std::less<>>;

/// Classifies a call expression against the sink vocabulary:
///  - ExemptLocal when the receiver chain starts from a local broadcast
///    type (or a variable declared with one),
///  - ExemptPermission when it passes two or more arguments,
///  - Sink for exactly one argument,
///  - NotSink for anything else, including non-calls.
SinkDecision is_sink_call(const Expr& expr, const TaintConfig& config,
                          const LocalTypes* local_types = nullptr);

std::string_view to_string(SinkDecision decision);

} // namespace iccscan
