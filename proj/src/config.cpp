#include "qres/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>

#include "qres/error.hpp"

namespace qres {
namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view k) {
  if (k.empty() || !(std::isalpha(static_cast<unsigned char>(k[0])) || k[0] == '_')) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

std::optional<double> to_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Strips a trailing comment that is not inside a string literal.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

ConfigValue parse_value(std::string_view raw, int line) {
  const std::string_view v = trim(raw);
  ConfigValue out;
  out.line = line;
  if (v.empty()) throw ParseError(line, "missing value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw ParseError(line, "unterminated string");
    out.kind = ConfigValue::Kind::string;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      char c = v[i];
      if (c == '\\') {
        if (i + 2 >= v.size()) throw ParseError(line, "dangling escape in string");
        c = v[++i];
        if (c == 'n') c = '\n';
        else if (c == 't') c = '\t';
        else if (c != '"' && c != '\\') throw ParseError(line, std::string("unknown escape \\") + c);
      } else if (c == '"') {
        throw ParseError(line, "unexpected quote inside string");
      }
      out.text.push_back(c);
    }
    return out;
  }
  if (v == "true" || v == "false") {
    out.kind = ConfigValue::Kind::boolean;
    out.boolean = v == "true";
    return out;
  }
  if (v.front() == '[') {
    if (v.back() != ']') throw ParseError(line, "unterminated array");
    out.kind = ConfigValue::Kind::array;
    std::string_view body = trim(v.substr(1, v.size() - 2));
    if (body.empty()) return out;
    while (true) {
      const auto comma = body.find(',');
      const std::string_view item = trim(body.substr(0, comma));
      const auto num = to_number(item);
      if (!num) throw ParseError(line, "array element is not a number: '" + std::string(item) + "'");
      out.array.push_back(*num);
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
    }
    return out;
  }
  const auto num = to_number(v);
  if (!num) throw ParseError(line, "cannot parse value '" + std::string(v) + "'");
  out.kind = ConfigValue::Kind::number;
  out.number = *num;
  out.text = std::string(v);
  return out;
}

std::pair<std::string, ConfigValue> parse_assignment(std::string_view body, int line) {
  const auto eq = body.find('=');
  if (eq == std::string_view::npos) throw ParseError(line, "expected key = value");
  const std::string_view key = trim(body.substr(0, eq));
  if (!valid_key(key)) throw ParseError(line, "invalid key '" + std::string(key) + "'");
  return {std::string(key), parse_value(body.substr(eq + 1), line)};
}

// Typed access that records problems instead of throwing on the first one.
class Reader {
 public:
  explicit Reader(const ConfigTable& t) : table_(t) {}

  void allow(std::initializer_list<const char*> keys) { allowed_.insert(keys.begin(), keys.end()); }

  void issue(const std::string& key, const std::string& reason) { issues_.emplace_back(key, reason); }

  bool has(const std::string& key) const { return table_.count(key) != 0; }

  std::optional<double> number(const std::string& key) {
    const auto it = table_.find(key);
    if (it == table_.end()) return std::nullopt;
    if (it->second.kind != ConfigValue::Kind::number) {
      issue(key, "a number");
      return std::nullopt;
    }
    if (!std::isfinite(it->second.number)) {
      issue(key, "a finite number");
      return std::nullopt;
    }
    return it->second.number;
  }

  std::optional<double> required_number(const std::string& key) {
    if (!has(key)) {
      issue(key, "a value (missing)");
      return std::nullopt;
    }
    return number(key);
  }

  std::optional<std::string> string(const std::string& key) {
    const auto it = table_.find(key);
    if (it == table_.end()) return std::nullopt;
    if (it->second.kind != ConfigValue::Kind::string) {
      issue(key, "a string");
      return std::nullopt;
    }
    return it->second.text;
  }

  std::optional<std::vector<double>> array(const std::string& key) {
    const auto it = table_.find(key);
    if (it == table_.end()) return std::nullopt;
    if (it->second.kind != ConfigValue::Kind::array) {
      issue(key, "an array of numbers");
      return std::nullopt;
    }
    return it->second.array;
  }

  std::optional<std::uint64_t> integer(const std::string& key, std::uint64_t min_value) {
    const auto it = table_.find(key);
    if (it == table_.end()) return std::nullopt;
    const ConfigValue& v = it->second;
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    if (v.kind != ConfigValue::Kind::number || ec != std::errc() || ptr != v.text.data() + v.text.size()) {
      issue(key, "an integer ≥ " + std::to_string(min_value));
      return std::nullopt;
    }
    if (out < min_value) {
      issue(key, "≥ " + std::to_string(min_value));
      return std::nullopt;
    }
    return out;
  }

  void finish() {
    for (const auto& [key, value] : table_) {
      if (!allowed_.count(key)) issues_.insert(issues_.begin(), {key, "a known key (unknown key)"});
    }
    if (!issues_.empty()) throw ValidationError(issues_);
  }

 private:
  const ConfigTable& table_;
  std::set<std::string> allowed_;
  std::vector<ValidationError::Issue> issues_;
};

}  // namespace

ConfigTable parse_kv(std::string_view text) {
  ConfigTable table;
  int line_no = 0;
  std::size_t pos = 0;
  while (true) {
    ++line_no;
    const auto nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    const std::string_view body = trim(strip_comment(line));
    if (!body.empty()) {
      auto [key, value] = parse_assignment(body, line_no);
      if (table.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
      table.emplace(std::move(key), std::move(value));
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return table;
}

void apply_overrides(ConfigTable& table, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    auto [key, value] = parse_assignment(trim(o), 0);
    table[key] = std::move(value);
  }
}

ScanConfig scan_config_from(const ConfigTable& table) {
  Reader r(table);
  r.allow({"mode", "omega_bar0", "drive_strength", "t_or_T", "tau", "pulse_area", "omega_min", "omega_max", "steps",
           "epsilon"});
  ScanConfig c;
  const auto mode = r.string("mode");
  if (!r.has("mode")) {
    r.issue("mode", "\"rabi\" or \"ramsey\" (missing)");
  } else if (mode && *mode != "rabi" && *mode != "ramsey") {
    r.issue("mode", "\"rabi\" or \"ramsey\"");
  }
  c.mode = mode && *mode == "ramsey" ? ScanMode::ramsey : ScanMode::rabi;

  c.omega_bar0 = r.required_number("omega_bar0").value_or(0.0);
  c.epsilon = r.number("epsilon").value_or(0.0);
  const auto length = r.required_number("t_or_T");
  if (length) {
    const bool ok = c.mode == ScanMode::rabi ? *length > 0.0 : *length >= 0.0;
    if (!ok) r.issue("t_or_T", c.mode == ScanMode::rabi ? "> 0" : "≥ 0");
    c.t_or_T = *length;
  }
  if (c.mode == ScanMode::ramsey) {
    const auto tau = r.required_number("tau");
    if (tau && !(*tau > 0.0)) r.issue("tau", "> 0");
    c.tau = tau.value_or(0.0);
  } else if (r.has("tau")) {
    r.issue("tau", "only in ramsey mode");
  }

  const auto drive = r.number("drive_strength");
  const auto area = r.number("pulse_area");
  if (drive && !(*drive > 0.0)) r.issue("drive_strength", "> 0");
  if (!r.has("drive_strength") && !r.has("pulse_area")) r.issue("pulse_area", "a value (or drive_strength)");
  const double pulse_length = c.pulse_length();
  if (drive && area) {
    c.drive_strength = *drive;
    c.pulse_area = *area;
    if (std::abs(*drive * pulse_length - *area) > 1e-12 * std::max(1.0, std::abs(*area))) {
      r.issue("pulse_area", "drive_strength × " + std::string(c.mode == ScanMode::rabi ? "t_or_T" : "tau") +
                                " within 1e-12");
    }
  } else if (area && pulse_length > 0.0) {
    c.pulse_area = *area;
    c.drive_strength = *area / pulse_length;
    if (!(c.drive_strength > 0.0)) r.issue("pulse_area", "> 0");
  } else if (drive) {
    c.drive_strength = *drive;
    c.pulse_area = *drive * pulse_length;
  }

  const auto lo = r.required_number("omega_min");
  const auto hi = r.required_number("omega_max");
  if (lo && hi && !(*lo < *hi)) r.issue("omega_min", "< omega_max");
  c.omega_min = lo.value_or(0.0);
  c.omega_max = hi.value_or(1.0);
  if (!r.has("steps")) r.issue("steps", "an integer ≥ 2 (missing)");
  c.steps = static_cast<std::size_t>(r.integer("steps", 2).value_or(2));
  r.finish();
  c.validate();
  return c;
}

EdmConfig edm_config_from(const ConfigTable& table) {
  Reader r(table);
  r.allow({"p_i", "eps_f", "omega_bar0", "d_n", "e_field", "omega2_tau", "T", "tau", "delta_omega_list",
           "field_pattern", "n_bar", "cycles_per_run", "runs", "seed"});
  EdmConfig c;
  c.model.p_i = r.number("p_i").value_or(1.0);
  c.model.eps_f = r.number("eps_f").value_or(0.0);
  if (!(c.model.p_i >= 0.0 && c.model.p_i <= 1.0)) r.issue("p_i", "a value in [0, 1]");
  if (!(c.model.eps_f >= 0.0 && c.model.eps_f <= 1.0)) r.issue("eps_f", "a value in [0, 1]");
  c.omega_bar0 = r.number("omega_bar0").value_or(0.0);
  c.d_n = r.number("d_n").value_or(0.0);

  const auto e_field = r.required_number("e_field");
  if (e_field && !(*e_field > 0.0)) r.issue("e_field", "> 0");
  c.e_field = e_field.value_or(1.0);
  if (const auto w = r.number("omega2_tau")) {
    if (std::abs(*w - 0.5 * std::numbers::pi) > 1e-12) r.issue("omega2_tau", "pi/2");
    c.omega2_tau = *w;
  }
  const auto T = r.required_number("T");
  if (T && !(*T > 0.0)) r.issue("T", "> 0");
  c.T = T && *T > 0.0 ? *T : 1.0;
  c.tau = r.number("tau").value_or(0.0);
  if (!(c.tau >= 0.0)) r.issue("tau", "≥ 0");

  if (const auto list = r.array("delta_omega_list")) {
    if (list->empty()) r.issue("delta_omega_list", "a non-empty array");
    c.delta_omega_list = *list;
  } else if (!r.has("delta_omega_list")) {
    c.delta_omega_list = EdmConfig::default_delta_omega(c.T);
  }
  if (const auto pattern = r.array("field_pattern")) {
    if (pattern->empty()) r.issue("field_pattern", "a non-empty array of +1/-1");
    for (double s : *pattern) {
      if (s != 1.0 && s != -1.0) {
        r.issue("field_pattern", "entries +1 or -1");
        break;
      }
      c.field_pattern.push_back(static_cast<int>(s));
    }
  } else if (!r.has("field_pattern")) {
    c.field_pattern = EdmConfig::default_field_pattern();
  }

  const auto n_bar = r.required_number("n_bar");
  if (n_bar && !(*n_bar > 0.0)) r.issue("n_bar", "> 0");
  c.n_bar = n_bar.value_or(1.0);
  if (!r.has("cycles_per_run")) r.issue("cycles_per_run", "an integer ≥ 1 (missing)");
  c.cycles_per_run = static_cast<std::size_t>(r.integer("cycles_per_run", 1).value_or(1));
  c.runs = static_cast<std::size_t>(r.integer("runs", 1).value_or(1));
  c.seed = r.integer("seed", 0).value_or(0);
  r.finish();
  c.validate();
  return c;
}

ScanConfig parse_scan_config(std::string_view text, const std::vector<std::string>& overrides) {
  ConfigTable t = parse_kv(text);
  apply_overrides(t, overrides);
  return scan_config_from(t);
}

EdmConfig parse_edm_config(std::string_view text, const std::vector<std::string>& overrides) {
  ConfigTable t = parse_kv(text);
  apply_overrides(t, overrides);
  return edm_config_from(t);
}

}  // namespace qres
