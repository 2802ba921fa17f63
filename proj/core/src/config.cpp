#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

#include "commsim/harness.hpp"

namespace commsim {

namespace {

using Field = std::variant<double SimParams::*, std::int64_t SimParams::*, int SimParams::*,
                           std::uint64_t SimParams::*>;

struct KeyDef {
  std::string_view name;
  Field field;
  bool allows_inf = false;
};

// Declaration order of SimParams.
const std::array<KeyDef, 27> kKeys{{
    {"pc_rate", &SimParams::pc_rate},
    {"ic_rate", &SimParams::ic_rate},
    {"r_rate", &SimParams::r_rate},
    {"n_rate", &SimParams::n_rate},
    {"a_rate", &SimParams::a_rate},
    {"p_rate", &SimParams::p_rate},
    {"nr_rate", &SimParams::nr_rate},
    {"ic_d", &SimParams::ic_d},
    {"n_d", &SimParams::n_d},
    {"a_d", &SimParams::a_d},
    {"p_d", &SimParams::p_d},
    {"r_d", &SimParams::r_d},
    {"churn_count", &SimParams::churn_count},
    {"steps", &SimParams::steps},
    {"record_every", &SimParams::record_every},
    {"grid_w", &SimParams::grid_w},
    {"grid_h", &SimParams::grid_h},
    {"seed", &SimParams::seed},
    {"service_duration", &SimParams::service_duration},
    {"activity_duration", &SimParams::activity_duration},
    {"activity_min_size", &SimParams::activity_min_size},
    {"activity_capacity", &SimParams::activity_capacity},
    {"activity_types", &SimParams::activity_types},
    {"participant_wait_window", &SimParams::participant_wait_window},
    {"deadline_alarm", &SimParams::deadline_alarm, true},
    {"deadline_nonurgent", &SimParams::deadline_nonurgent, true},
    {"pref_informal", &SimParams::pref_informal},
}};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

const KeyDef* find_key(std::string_view name) {
  for (const auto& k : kKeys) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::vector<std::string_view> config_keys() {
  std::vector<std::string_view> out;
  for (const auto& k : kKeys) out.push_back(k.name);
  return out;
}

SimParams parse_config(std::string_view text) {
  SimParams params;
  std::set<std::string_view, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected `key = value`");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "missing key");
    if (value.empty()) throw ParseError(line_no, "missing value for `" + std::string(key) + "`");

    const KeyDef* def = find_key(key);
    if (!def) throw ParseError(line_no, "unknown key `" + std::string(key) + "`");
    if (!seen.insert(def->name).second) {
      throw ParseError(line_no, "duplicate key `" + std::string(key) + "`");
    }

    if (def->allows_inf && (value == "inf" || value == "never")) {
      params.*std::get<std::int64_t SimParams::*>(def->field) = kNever;
      continue;
    }
    const bool ok = std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(params.*member)>;
          T parsed{};
          if (!parse_number(value, parsed)) return false;
          params.*member = parsed;
          return true;
        },
        def->field);
    if (!ok) {
      throw ParseError(line_no, "bad value `" + std::string(value) + "` for `" +
                                    std::string(key) + "`");
    }
  }
  params.validate();
  return params;
}

SimParams load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string write_config(const SimParams& params) {
  std::ostringstream out;
  for (const auto& def : kKeys) {
    out << def.name << " = ";
    std::visit(
        [&](auto member) {
          const auto v = params.*member;
          using T = std::remove_cv_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out << format_double(v);
          } else if constexpr (std::is_same_v<T, std::int64_t>) {
            if (def.allows_inf && v == kNever) {
              out << "inf";
            } else {
              out << v;
            }
          } else {
            out << v;
          }
        },
        def.field);
    out << '\n';
  }
  return out.str();
}

}  // namespace commsim
