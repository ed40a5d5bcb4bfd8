#include "fixture_gen.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

namespace iccscan::testing {

namespace {

class Generator {
 public:
  Generator(std::uint32_t seed, const FixtureShape& shape)
      : rng_(seed), shape_(shape) {}

  std::string run(std::uint32_t seed) {
    const int methods = pick(shape_.min_methods, shape_.max_methods);
    const bool with_helper = methods > 1 && coin(0.5);

    std::ostringstream out;
    out << "package gen;\n\n"
        << "import android.app.Service;\n"
        << "import android.car.Car;\n"
        << "import android.car.CarInfoManager;\n"
        << "import android.content.Context;\n"
        << "import android.content.Intent;\n"
        << "import androidx.localbroadcastmanager.content.LocalBroadcastManager;\n\n"
        << "public class Gen" << seed << " extends Service {\n"
        << "    private boolean flag;\n"
        << "    private Car car;\n";

    if (with_helper) {
      helper_ = "build" + std::to_string(seed % 1000);
      Body body;
      body.strings.push_back("value");
      fill(body, pick(shape_.min_statements, shape_.max_statements) - 1);
      if (body.intents.empty()) {
        declare_new(body);
      }
      body.emit("return " + any(body.intents) + ";");
      out << "\n    private Intent " << helper_ << "(String value) {\n"
          << body.text.str() << "    }\n";
    }
    for (int m = with_helper ? 1 : 0; m < methods; ++m) {
      Body body;
      body.strings.push_back("label");
      fill(body, pick(shape_.min_statements, shape_.max_statements));
      out << "\n    void run" << m << "(Context ctx, String label) {\n"
          << body.text.str() << "    }\n";
    }
    out << "}\n";
    return out.str();
  }

 private:
  struct Body {
    std::ostringstream text;
    int depth = 2;
    std::vector<std::string> intents;
    std::vector<std::string> strings;
    std::vector<std::string> cars;
    std::vector<std::string> managers;

    void emit(const std::string& line) {
      text << std::string(static_cast<std::size_t>(depth) * 4, ' ') << line
           << '\n';
    }
  };

  int pick(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  const std::string& any(const std::vector<std::string>& pool) {
    return pool[static_cast<std::size_t>(
        pick(0, static_cast<int>(pool.size()) - 1))];
  }
  std::string fresh(const char* prefix) {
    return prefix + std::to_string(++counter_);
  }

  void declare_new(Body& b) {
    const std::string name = fresh("i");
    b.emit("Intent " + name + " = new Intent(\"gen.action." +
           std::to_string(counter_) + "\");");
    b.intents.push_back(name);
  }

  void fill(Body& b, int budget) {
    while (budget > 0) {
      budget -= statement(b, budget, true);
    }
  }

  // Emits one statement (or an if block) and returns how many statements
  // it used.
  int statement(Body& b, int budget, bool allow_block) {
    if (b.intents.empty() || coin(0.15)) {
      if (!helper_.empty() && coin(0.3)) {
        const std::string name = fresh("i");
        b.emit("Intent " + name + " = " + helper_ + "(" + any(b.strings) +
               ");");
        b.intents.push_back(name);
      } else {
        declare_new(b);
      }
      return 1;
    }
    const std::string& intent = any(b.intents);
    switch (pick(0, 13)) {
      case 0: {
        const std::string name = fresh("i");
        b.emit("Intent " + name + " = " + intent + ";");
        b.intents.push_back(name);
        return 1;
      }
      case 1:
        b.emit(any(b.intents) + " = " + intent + ";");
        return 1;
      case 2:
        b.emit(intent + " = new Intent(\"gen.fresh\");");
        return 1;
      case 3:
        if (!b.strings.empty() && coin(0.7)) {
          b.emit(intent + ".putExtra(\"k" + std::to_string(counter_) +
                 "\", " + any(b.strings) + ");");
        } else {
          b.emit(intent + ".putExtra(\"k\", \"literal\");");
        }
        return 1;
      case 4: {
        const std::string name = fresh("s");
        b.emit("String " + name + " = " + intent + ".getStringExtra(\"k\");");
        b.strings.push_back(name);
        return 1;
      }
      case 5:
      case 6:
        b.emit("sendBroadcast(" + intent + ");");
        return 1;
      case 7:
        b.emit("ctx.sendBroadcast(" + intent + ");");
        return 1;
      case 8:
        b.emit("sendBroadcast(" + intent + ", \"gen.permission\");");
        return 1;
      case 9:
        b.emit("LocalBroadcastManager.getInstance(this).sendBroadcast(" +
               intent + ");");
        return 1;
      case 10: {
        if (b.managers.empty()) {
          const std::string name = fresh("lbm");
          b.emit("LocalBroadcastManager " + name +
                 " = LocalBroadcastManager.getInstance(ctx);");
          b.managers.push_back(name);
          return 1;
        }
        b.emit(any(b.managers) + ".sendBroadcast(" + intent + ");");
        return 1;
      }
      case 11: {
        if (b.cars.empty()) {
          const std::string name = fresh("info");
          b.emit("CarInfoManager " + name +
                 " = (CarInfoManager) car.getCarManager(Car.INFO_SERVICE);");
          b.cars.push_back(name);
          return 1;
        }
        b.emit(intent + ".putExtra(\"model\", " + any(b.cars) +
               ".getModel());");
        return 1;
      }
      case 12: {
        const std::string name = fresh("i");
        b.emit("Intent " + name + " = (Intent) " + intent + ".clone();");
        b.intents.push_back(name);
        return 1;
      }
      default: {
        if (!allow_block || budget < 2) {
          b.emit(intent + ".setAction(\"gen.action\");");
          return 1;
        }
        b.emit("if (flag) {");
        ++b.depth;
        // Names declared inside the block go out of scope at its end.
        const std::size_t intents = b.intents.size();
        const std::size_t strings = b.strings.size();
        const std::size_t cars = b.cars.size();
        const std::size_t managers = b.managers.size();
        int used = 1;
        const int inner = pick(1, std::min(2, budget - 1));
        for (int i = 0; i < inner; ++i) {
          used += statement(b, budget - used, false);
        }
        b.intents.resize(intents);
        b.strings.resize(strings);
        b.cars.resize(cars);
        b.managers.resize(managers);
        --b.depth;
        b.emit("}");
        return used;
      }
    }
  }

  std::mt19937 rng_;
  FixtureShape shape_;
  std::string helper_;
  int counter_ = 0;
};

} // namespace

std::string generate_fixture(std::uint32_t seed, const FixtureShape& shape) {
  return Generator(seed, shape).run(seed);
}

} // namespace iccscan::testing
