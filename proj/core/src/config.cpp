#include "iccscan/config.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace iccscan {

TaintConfig default_config() {
  TaintConfig config;
  config.sources = {"Intent"};
  config.sensitive_sources = {"Car", "CarInfoManager", "CarPropertyManager"};
  config.sinks = {"sendBroadcast"};
  config.local_broadcast_types = {"LocalBroadcastManager"};
  config.mitigation_tips = {{"sendBroadcast", std::string(kSendBroadcastTip)}};
  return config;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) {
    return false;
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const unsigned char c = s[i];
    const bool alpha = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                       c == '_' || c == '$' || c >= 0x80;
    const bool digit = c >= '0' && c <= '9';
    if (!(alpha || (digit && i > 0))) {
      return false;
    }
  }
  return true;
}

std::string generated_tip(const std::string& sink) {
  return "Leak: " + sink + " leaking information to all the apps.";
}

} // namespace

void validate(const TaintConfig& config) {
  for (const std::string& type : config.sources) {
    if (config.sensitive_sources.contains(type)) {
      throw ConfigError(0, "sensitive_sources",
                        "'" + type +
                            "' is declared both as source and as sensitive "
                            "source");
    }
  }
  for (const std::string& sink : config.sinks) {
    if (!config.mitigation_tips.contains(sink)) {
      throw ConfigError(0, "tip." + sink,
                        "sink '" + sink + "' has no mitigation tip");
    }
  }
}

TaintConfig parse_config(std::string_view text, std::string_view origin) {
  TaintConfig config = default_config();
  std::map<std::string, int> tip_lines;

  const auto fail = [&](int line, const std::string& key,
                        const std::string& message) {
    throw ConfigError(line, key,
                      std::string(origin) + ":" + std::to_string(line) +
                          ": " + message);
  };

  std::istringstream in{std::string(text)};
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    std::string_view line = raw_line;
    if (const auto hash = line.find('#'); hash != std::string_view::npos &&
                                          !trim(line).starts_with("tip.")) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(line_no, std::string(line), "expected 'key = values'");
    }
    char op = '=';
    std::string_view key = line.substr(0, eq);
    if (!key.empty() && (key.back() == '+' || key.back() == '-')) {
      op = key.back();
      key.remove_suffix(1);
    }
    key = trim(key);
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string key_str(key);
    if (key.empty()) {
      fail(line_no, key_str, "missing key before '='");
    }

    if (key.starts_with("tip.")) {
      const std::string sink(key.substr(4));
      if (!is_identifier(sink)) {
        fail(line_no, key_str, "invalid sink name in '" + key_str + "'");
      }
      if (op != '=') {
        fail(line_no, key_str, "tips only support '='");
      }
      if (value.empty()) {
        fail(line_no, key_str, "empty tip");
      }
      config.mitigation_tips[sink] = std::string(value);
      tip_lines[sink] = line_no;
      continue;
    }

    std::set<std::string>* target = nullptr;
    if (key == "sources") {
      target = &config.sources;
    } else if (key == "sensitive_sources") {
      target = &config.sensitive_sources;
    } else if (key == "sinks") {
      target = &config.sinks;
    } else if (key == "local_broadcast_types") {
      target = &config.local_broadcast_types;
    } else {
      fail(line_no, key_str, "unknown key '" + key_str + "'");
    }

    std::set<std::string> values;
    std::string token;
    std::istringstream items{std::string(value)};
    while (items >> token) {
      std::string_view item = token;
      while (!item.empty()) {
        const auto comma = item.find(',');
        const std::string_view piece = item.substr(0, comma);
        if (!piece.empty()) {
          if (!is_identifier(piece)) {
            fail(line_no, key_str,
                 "'" + std::string(piece) + "' is not an identifier");
          }
          values.emplace(piece);
        }
        if (comma == std::string_view::npos) {
          break;
        }
        item.remove_prefix(comma + 1);
      }
    }

    if (op == '=') {
      *target = std::move(values);
    } else if (op == '+') {
      target->insert(values.begin(), values.end());
    } else {
      for (const std::string& v : values) {
        target->erase(v);
      }
    }
  }

  for (const auto& [sink, line] : tip_lines) {
    if (!config.sinks.contains(sink)) {
      fail(line, "tip." + sink, "tip for unknown sink '" + sink + "'");
    }
  }
  std::erase_if(config.mitigation_tips, [&](const auto& entry) {
    return !config.sinks.contains(entry.first);
  });
  for (const std::string& sink : config.sinks) {
    if (!config.mitigation_tips.contains(sink)) {
      config.mitigation_tips[sink] = generated_tip(sink);
    }
  }

  try {
    validate(config);
  } catch (const ConfigError& e) {
    throw ConfigError(e.line(), e.key(),
                      std::string(origin) + ": " + e.what());
  }
  return config;
}

TaintConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(0, "", "cannot open config file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::string write_config(const TaintConfig& config) {
  std::ostringstream out;
  const auto write_set = [&](std::string_view key,
                             const std::set<std::string>& values) {
    out << key << " =";
    for (const std::string& v : values) {
      out << ' ' << v;
    }
    out << '\n';
  };
  write_set("sources", config.sources);
  write_set("sensitive_sources", config.sensitive_sources);
  write_set("sinks", config.sinks);
  write_set("local_broadcast_types", config.local_broadcast_types);
  for (const auto& [sink, tip] : config.mitigation_tips) {
    out << "tip." << sink << " = " << tip << '\n';
  }
  return out.str();
}

namespace {

bool receiver_is_local_broadcast(const Expr* receiver, const TaintConfig& config,
                                 const LocalTypes* local_types) {
  const auto is_local = [&](const std::string& type) {
    return config.local_broadcast_types.contains(type);
  };
  while (receiver != nullptr) {
    switch (receiver->kind()) {
      case ExprKind::Name: {
        if (is_local(receiver->text())) {
          return true;
        }
        if (local_types != nullptr) {
          const auto it = local_types->find(receiver->text());
          return it != local_types->end() && is_local(it->second);
        }
        return false;
      }
      case ExprKind::Call:
      case ExprKind::FieldAccess:
        receiver = receiver->receiver();
        break;
      case ExprKind::Cast:
        if (is_local(receiver->text())) {
          return true;
        }
        receiver = &receiver->operand();
        break;
      case ExprKind::New:
        return is_local(receiver->text());
      default:
        return false;
    }
  }
  return false;
}

} // namespace

SinkDecision is_sink_call(const Expr& expr, const TaintConfig& config,
                          const LocalTypes* local_types) {
  if (expr.kind() != ExprKind::Call || !config.sinks.contains(expr.text())) {
    return SinkDecision::NotSink;
  }
  if (receiver_is_local_broadcast(expr.receiver(), config, local_types)) {
    return SinkDecision::ExemptLocal;
  }
  const std::size_t arity = expr.args().size();
  if (arity >= 2) {
    return SinkDecision::ExemptPermission;
  }
  return arity == 1 ? SinkDecision::Sink : SinkDecision::NotSink;
}

std::string_view to_string(SinkDecision decision) {
  switch (decision) {
    case SinkDecision::Sink:
      return "Sink";
    case SinkDecision::ExemptPermission:
      return "ExemptPermission";
    case SinkDecision::ExemptLocal:
      return "ExemptLocal";
    case SinkDecision::NotSink:
      return "NotSink";
  }
  return "NotSink";
}

} // namespace iccscan
