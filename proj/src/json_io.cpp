#include "sgdlab/json_io.hpp"

#include "sgdlab/errors.hpp"

namespace sgdlab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ValidationError(path + ": " + message);
}

const json& require(const json& doc, const char* key, const std::string& path) {
  if (!doc.is_object() || !doc.contains(key)) fail(path + "." + key, "missing field");
  return doc.at(key);
}

double number(const json& value, const std::string& path) {
  if (!value.is_number()) fail(path, "expected a number");
  return value.get<double>();
}

long integer(const json& value, const std::string& path) {
  if (!value.is_number_integer()) fail(path, "expected an integer");
  return value.get<long>();
}

std::vector<double> number_list(const json& value, const std::string& path) {
  if (!value.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(number(value[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Spectrum spectrum_from_json(const json& doc, const std::string& path) {
  const json& kind_field = require(doc, "kind", path);
  if (!kind_field.is_string()) fail(path + ".kind", "expected a string");
  try {
    const SpectrumKind kind = spectrum_kind_from_string(kind_field.get<std::string>());
    if (kind == SpectrumKind::Explicit) {
      return make_spectrum(number_list(require(doc, "values", path), path + ".values"));
    }
    const long d = integer(require(doc, "d", path), path + ".d");
    if (d < 1) fail(path + ".d", "must be positive");
    const double param = doc.contains("param") ? number(doc.at("param"), path + ".param") : 0.0;
    return make_spectrum(kind, static_cast<std::size_t>(d), param);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

}  // namespace

ProblemInstance instance_from_json(const json& doc, const std::string& path) {
  if (!doc.is_object()) fail(path, "expected an object");
  Spectrum spectrum = spectrum_from_json(require(doc, "spectrum", path), path + ".spectrum");
  const std::size_t d = spectrum.dim();

  std::vector<double> w_star;
  const json& target = require(doc, "target", path);
  if (target.is_string()) {
    try {
      w_star = make_target(target_kind_from_string(target.get<std::string>()), d);
    } catch (const std::exception& e) {
      fail(path + ".target", e.what());
    }
  } else {
    w_star = number_list(target, path + ".target");
  }

  std::vector<double> w0(d, 0.0);
  if (doc.contains("w0")) {
    const json& init = doc.at("w0");
    if (init.is_string()) {
      if (init.get<std::string>() != "zeros") fail(path + ".w0", "expected \"zeros\" or a list");
    } else {
      w0 = number_list(init, path + ".w0");
    }
  }

  const double sigma2 = number(require(doc, "sigma2", path), path + ".sigma2");
  const double alpha = doc.contains("alpha") ? number(doc.at("alpha"), path + ".alpha") : 3.0;
  const double beta = doc.contains("beta") ? number(doc.at("beta"), path + ".beta") : 1.0;
  try {
    return ProblemInstance(std::move(spectrum), std::move(w_star), std::move(w0), sigma2, alpha, beta);
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

Schedule schedule_from_json(const json& doc, const std::string& path) {
  const json& variant = require(doc, "variant", path);
  if (!variant.is_string()) fail(path + ".variant", "expected a string");
  const double gamma0 = number(require(doc, "gamma0", path), path + ".gamma0");
  const long n = integer(require(doc, "N", path), path + ".N");
  try {
    switch (schedule_kind_from_string(variant.get<std::string>())) {
      case ScheduleKind::Constant:
        return Schedule::constant(gamma0, n);
      case ScheduleKind::TailGeometric: {
        const long s = integer(require(doc, "s", path), path + ".s");
        const long k = doc.contains("K") ? integer(doc.at("K"), path + ".K")
                                         : default_phase_length(n, s);
        return Schedule::tail_geometric(gamma0, n, s, k);
      }
      case ScheduleKind::TailPolynomial: {
        const long s = integer(require(doc, "s", path), path + ".s");
        const double a = number(require(doc, "a", path), path + ".a");
        return Schedule::tail_polynomial(gamma0, n, s, a);
      }
    }
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    fail(path, what);
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  fail(path, "unreachable");
}

json schedule_to_json(const Schedule& schedule) {
  json out{{"variant", to_string(schedule.kind())},
           {"gamma0", schedule.gamma0()},
           {"N", schedule.horizon()},
           {"s", schedule.hold_steps()}};
  if (schedule.kind() == ScheduleKind::TailGeometric) out["K"] = schedule.phase_length();
  if (schedule.kind() == ScheduleKind::TailPolynomial) out["a"] = schedule.exponent();
  return out;
}

json bound_report_to_json(const BoundReport& report) {
  auto optional_value = [](const std::optional<double>& v) -> json {
    return v ? json(*v) : json(nullptr);
  };
  json flags = json::object();
  for (const auto& p : report.preconditions) flags[p.name] = p.ok;
  return json{{"constants", report.constants},
              {"k_star", report.k_star},
              {"k_dagger", report.k_dagger},
              {"dim_eff", report.dim_eff},
              {"bias_upper", optional_value(report.bias_upper)},
              {"var_upper", optional_value(report.var_upper)},
              {"bias_lower", optional_value(report.bias_lower)},
              {"var_lower", optional_value(report.var_lower)},
              {"preconditions", flags}};
}

}  // namespace sgdlab
