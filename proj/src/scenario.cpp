#include "wormsim/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wormsim {

using nlohmann::json;

std::string_view to_string(Engine engine) {
  switch (engine) {
    case Engine::ClosedForm: return "closed_form";
    case Engine::Integrate: return "integrate";
    case Engine::Stochastic: return "stochastic";
  }
  return "unknown";
}

std::optional<Engine> parse_engine(std::string_view text) {
  if (text == "closed_form") return Engine::ClosedForm;
  if (text == "integrate") return Engine::Integrate;
  if (text == "stochastic") return Engine::Stochastic;
  return std::nullopt;
}

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::Config, fmt::format("{}: {}", path, message));
}

// Typed access to one JSON object; finish() rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) config_error(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const json& required(const std::string& key) {
    const json* v = find(key);
    if (!v) config_error(key_path(key), "missing required key");
    return *v;
  }

  double number(const json& v, const std::string& key) const {
    if (!v.is_number()) config_error(key_path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) config_error(key_path(key), "expected a finite number");
    return x;
  }

  std::int64_t integer(const json& v, const std::string& key) const {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.0e18) {
        return static_cast<std::int64_t>(x);
      }
    }
    config_error(key_path(key), "expected an integer");
  }

  std::string text(const json& v, const std::string& key) const {
    if (!v.is_string()) config_error(key_path(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) config_error(key_path(key), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void parse_virulence(const std::string& text, const std::string& path, ScenarioParams& params) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    config_error(path, "expected '<rate>/<unit>', e.g. \"1.8/hour\"");
  }
  const std::string rate = text.substr(0, slash);
  const std::string unit = text.substr(slash + 1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(rate.data(), rate.data() + rate.size(), value);
  if (ec != std::errc() || ptr != rate.data() + rate.size()) {
    config_error(path, fmt::format("cannot read rate '{}'", rate));
  }
  const auto parsed_unit = parse_time_unit(unit);
  if (!parsed_unit) {
    config_error(path, fmt::format("unknown unit '{}' (second, minute, hour, day)", unit));
  }
  params.virulence = value;
  params.unit = *parsed_unit;
}

ScenarioParams parse_params(const json& doc) {
  ObjectReader r(doc, "params");
  ScenarioParams p;
  const std::string defense = r.text(r.required("defense"), "defense");
  const auto parsed = parse_defense(defense);
  if (!parsed) {
    config_error("params.defense",
                 fmt::format("unknown defense '{}' (no_patching, fixed_servers, peer_to_peer)",
                             defense));
  }
  p.defense = *parsed;
  p.n_hosts = r.integer(r.required("n_hosts"), "n_hosts");
  parse_virulence(r.text(r.required("virulence"), "virulence"), "params.virulence", p);
  p.i0 = r.integer(r.required("i0"), "i0");
  if (p.defense == Defense::NoPatching) {
    if (const json* v = r.find("gamma")) p.gamma = r.number(*v, "gamma");
    if (const json* v = r.find("p_bar")) p.p_bar = r.integer(*v, "p_bar");
  } else {
    p.gamma = r.number(r.required("gamma"), "gamma");
    p.p_bar = r.integer(r.required("p_bar"), "p_bar");
  }
  r.finish();
  try {
    validate(p);
  } catch (const Error& e) {
    config_error("params", e.what());
  }
  return p;
}

IntegratorConfig parse_integrator(const json& doc) {
  ObjectReader r(doc, "integrator");
  IntegratorConfig c;
  if (const json* v = r.find("dt_itu")) c.dt_itu = r.number(*v, "dt_itu");
  if (const json* v = r.find("t_end_itu")) c.t_end_itu = r.number(*v, "t_end_itu");
  if (const json* v = r.find("sample_stride")) {
    c.sample_stride = static_cast<int>(r.integer(*v, "sample_stride"));
  }
  if (const json* v = r.find("method")) {
    if (r.text(*v, "method") != "rk4_fixed") {
      config_error("integrator.method", "only 'rk4_fixed' is supported");
    }
  }
  r.finish();
  if (!(c.dt_itu > 0.0)) config_error("integrator.dt_itu", "must be positive");
  if (!(c.t_end_itu > 0.0)) config_error("integrator.t_end_itu", "must be positive");
  if (c.sample_stride < 1) config_error("integrator.sample_stride", "must be >= 1");
  return c;
}

StochasticConfig parse_stochastic(const json& doc) {
  ObjectReader r(doc, "stochastic");
  StochasticConfig c;
  if (const json* v = r.find("seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      config_error("stochastic.seed", "expected an unsigned 64-bit integer");
    }
    c.seed = v->get<std::uint64_t>();
  }
  if (const json* v = r.find("t_end_itu")) c.t_end_itu = r.number(*v, "t_end_itu");
  if (const json* v = r.find("sample_dt_itu")) c.sample_dt_itu = r.number(*v, "sample_dt_itu");
  if (const json* v = r.find("runs")) c.runs = static_cast<int>(r.integer(*v, "runs"));
  r.finish();
  if (c.runs < 1) config_error("stochastic.runs", "must be >= 1");
  if (!(c.sample_dt_itu > 0.0)) config_error("stochastic.sample_dt_itu", "must be positive");
  if (!(c.t_end_itu > 0.0)) config_error("stochastic.t_end_itu", "must be positive");
  return c;
}

MonitorsBlock parse_monitors(const json& doc, const ScenarioParams& params) {
  ObjectReader r(doc, "monitors");
  MonitorsBlock m;
  if (const json* v = r.find("deadline_itu")) m.deadline_itu = r.number(*v, "deadline_itu");
  if (const json* v = r.find("count")) m.count = r.integer(*v, "count");
  if (const json* v = r.find("detection_runs")) {
    m.detection_runs = static_cast<int>(r.integer(*v, "detection_runs"));
  }
  r.finish();
  if (m.deadline_itu && !(*m.deadline_itu > 0.0)) {
    config_error("monitors.deadline_itu", "must be positive");
  }
  if (m.count && (*m.count < 1 || *m.count > params.n_hosts)) {
    config_error("monitors.count", "must lie in [1, n_hosts]");
  }
  if (m.detection_runs && *m.detection_runs < 1) {
    config_error("monitors.detection_runs", "must be >= 1");
  }
  return m;
}

CompareSettings parse_compare(const json& doc) {
  ObjectReader r(doc, "compare");
  CompareSettings c;
  if (const json* v = r.find("tolerance")) c.tolerance = r.number(*v, "tolerance");
  if (const json* v = r.find("analytic_tolerance")) {
    c.analytic_tolerance = r.number(*v, "analytic_tolerance");
  }
  r.finish();
  if (!(c.tolerance >= 0.0)) config_error("compare.tolerance", "must be nonnegative");
  if (c.analytic_tolerance && !(*c.analytic_tolerance >= 0.0)) {
    config_error("compare.analytic_tolerance", "must be nonnegative");
  }
  return c;
}

}  // namespace

ScenarioFile parse_scenario(const json& doc) {
  ObjectReader r(doc, "");
  ScenarioFile s;
  s.name = r.text(r.required("name"), "name");
  if (const json* v = r.find("description")) s.description = r.text(*v, "description");
  s.params = parse_params(r.required("params"));

  const json& engines = r.required("engines");
  if (!engines.is_array()) config_error("engines", "expected a list");
  for (const auto& e : engines) {
    if (!e.is_string()) config_error("engines", "expected engine names");
    const auto engine = parse_engine(e.get<std::string>());
    if (!engine) {
      config_error("engines", fmt::format("unknown engine '{}' (closed_form, integrate, stochastic)",
                                          e.get<std::string>()));
    }
    for (Engine seen : s.engines) {
      if (seen == *engine) config_error("engines", fmt::format("duplicate engine '{}'", to_string(seen)));
    }
    s.engines.push_back(*engine);
  }
  if (s.engines.empty()) config_error("engines", "no engines selected");

  if (const json* v = r.find("integrator")) s.integrator = parse_integrator(*v);
  if (const json* v = r.find("stochastic")) s.stochastic = parse_stochastic(*v);
  if (const json* v = r.find("kappa")) {
    if (!v->is_array()) config_error("kappa", "expected a list of fractions");
    for (const auto& k : *v) {
      const double kappa = r.number(k, "kappa");
      if (!(kappa > 0.0 && kappa < 1.0)) config_error("kappa", "each kappa must lie in (0, 1)");
      s.kappa.push_back(kappa);
    }
  }
  if (const json* v = r.find("extinction_threshold")) {
    s.extinction_threshold = r.number(*v, "extinction_threshold");
    if (!(*s.extinction_threshold > 0.0)) config_error("extinction_threshold", "must be positive");
  }
  if (const json* v = r.find("monitors")) s.monitors = parse_monitors(*v, s.params);
  if (const json* v = r.find("compare")) s.compare = parse_compare(*v);
  r.finish();
  return s;
}

json to_json(const ScenarioFile& s) {
  const auto& p = s.params;
  json params = {{"n_hosts", p.n_hosts},
                 {"virulence", fmt::format("{}/{}", p.virulence, to_string(p.unit))},
                 {"gamma", p.gamma},
                 {"i0", p.i0},
                 {"defense", std::string(to_string(p.defense))}};
  if (p.defense != Defense::NoPatching || p.p_bar > 0) params["p_bar"] = p.p_bar;
  json engines = json::array();
  for (Engine e : s.engines) engines.push_back(std::string(to_string(e)));
  json doc = {
      {"name", s.name},
      {"params", params},
      {"engines", engines},
      {"integrator",
       {{"dt_itu", s.integrator.dt_itu},
        {"t_end_itu", s.integrator.t_end_itu},
        {"sample_stride", s.integrator.sample_stride},
        {"method", "rk4_fixed"}}},
      {"stochastic",
       {{"seed", s.stochastic.seed},
        {"t_end_itu", s.stochastic.t_end_itu},
        {"sample_dt_itu", s.stochastic.sample_dt_itu},
        {"runs", s.stochastic.runs}}},
      {"kappa", s.kappa},
      {"compare", {{"tolerance", s.compare.tolerance}}},
  };
  if (!s.description.empty()) doc["description"] = s.description;
  if (s.compare.analytic_tolerance) doc["compare"]["analytic_tolerance"] = *s.compare.analytic_tolerance;
  if (s.extinction_threshold) doc["extinction_threshold"] = *s.extinction_threshold;
  if (s.monitors) {
    json m = json::object();
    if (s.monitors->deadline_itu) m["deadline_itu"] = *s.monitors->deadline_itu;
    if (s.monitors->count) m["count"] = *s.monitors->count;
    if (s.monitors->detection_runs) m["detection_runs"] = *s.monitors->detection_runs;
    doc["monitors"] = m;
  }
  return doc;
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorCode::Config,
                fmt::format("--set: expected KEY=VALUE, got '{}'", assignment));
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw Error(ErrorCode::Config, fmt::format("--set: bad key '{}'", key));
    if (!node->is_object()) {
      throw Error(ErrorCode::Config, fmt::format("--set: '{}' does not name an object path", key));
    }
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

json read_scenario_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, fmt::format("{}: cannot open scenario file", path));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, fmt::format("{}: {}", path, e.what()));
  }
}

namespace {

json make_builtin(const std::string& name, const std::string& description, json params,
                  json engines, double t_end, int stride) {
  return {{"name", name},
          {"description", description},
          {"params", std::move(params)},
          {"engines", std::move(engines)},
          {"integrator", {{"dt_itu", 0.001}, {"t_end_itu", t_end}, {"sample_stride", stride}}},
          {"stochastic",
           {{"seed", 1}, {"t_end_itu", t_end}, {"sample_dt_itu", 0.05}, {"runs", 20}}},
          {"compare", {{"tolerance", 0.1}}}};
}

const std::map<std::string, json>& builtins() {
  static const std::map<std::string, json> table = [] {
    std::map<std::string, json> t;
    const json fluid = {"closed_form", "integrate"};
    const json all = {"closed_form", "integrate", "stochastic"};

    auto code_red = [](json extra) {
      json p = {{"n_hosts", 360000}, {"virulence", "1.8/hour"}, {"i0", 25}};
      p.update(extra);
      return p;
    };
    t["codered-nopatch"] =
        make_builtin("codered-nopatch", "Code-Red v2 without patching",
                     code_red({{"defense", "no_patching"}}), fluid, 30.0, 100);
    t["codered-nopatch"]["kappa"] = {0.5, 0.9};
    t["codered-fixed"] = make_builtin(
        "codered-fixed", "Code-Red v2, fixed patch servers with gamma*p_bar = 7800 per ITU",
        code_red({{"defense", "fixed_servers"}, {"gamma", 312}, {"p_bar", 25}}), fluid, 60.0, 100);
    t["codered-p2p-g1"] = make_builtin(
        "codered-p2p-g1", "Code-Red v2, peer-to-peer patching with gamma = 1",
        code_red({{"defense", "peer_to_peer"}, {"gamma", 1}, {"p_bar", 10}}), fluid, 40.0, 100);
    t["codered-p2p-g2"] = make_builtin(
        "codered-p2p-g2", "Code-Red v2, peer-to-peer patching with gamma = 2",
        code_red({{"defense", "peer_to_peer"}, {"gamma", 2}, {"p_bar", 10}}), fluid, 20.0, 100);

    // Desk-scale variants keep the dimensionless rates at N = 1e4.
    auto desk = [](json extra) {
      json p = {{"n_hosts", 10000}, {"virulence", "1.8/hour"}, {"i0", 25}};
      p.update(extra);
      return p;
    };
    t["codered-nopatch-desk"] =
        make_builtin("codered-nopatch-desk", "Code-Red v2 without patching, N = 1e4",
                     desk({{"defense", "no_patching"}, {"i0", 10}}), all, 20.0, 50);
    t["codered-nopatch-desk"]["kappa"] = {0.5, 0.9};
    t["codered-fixed-desk"] = make_builtin(
        "codered-fixed-desk", "Code-Red v2 fixed servers, N = 1e4, gamma*p_bar scaled to 216.67",
        desk({{"defense", "fixed_servers"}, {"gamma", 7800.0 / 360000.0 * 10000.0 / 25.0},
              {"p_bar", 25}}),
        all, 60.0, 50);
    t["codered-p2p-g1-desk"] =
        make_builtin("codered-p2p-g1-desk", "Peer-to-peer patching, gamma = 1, N = 1e4",
                     desk({{"defense", "peer_to_peer"}, {"gamma", 1}, {"p_bar", 10}}), all, 40.0, 50);
    t["codered-p2p-g2-desk"] =
        make_builtin("codered-p2p-g2-desk", "Peer-to-peer patching, gamma = 2, N = 1e4",
                     desk({{"defense", "peer_to_peer"}, {"gamma", 2}, {"p_bar", 10}}), all, 20.0, 50);

    t["slammer-nopatch"] = make_builtin(
        "slammer-nopatch", "Slammer-like worm without patching",
        {{"n_hosts", 85000}, {"virulence", "1.5/minute"}, {"i0", 1}, {"defense", "no_patching"}},
        fluid, 25.0, 100);
    t["slammer-nopatch"]["kappa"] = {0.5};

    t["monitoring-slammer"] = make_builtin(
        "monitoring-slammer", "Telescope sizing for a Slammer-like worm, deadline ln ln N",
        {{"n_hosts", 85000}, {"virulence", "1.5/minute"}, {"i0", 1}, {"defense", "no_patching"}},
        {"closed_form", "stochastic"}, 15.0, 100);
    t["monitoring-slammer"]["monitors"] = {{"count", 7485}, {"detection_runs", 200}};
    t["monitoring-slammer"]["kappa"] = {0.5};

    t["monitoring-ipv4"] = make_builtin(
        "monitoring-ipv4", "Telescope sizing over the whole IPv4 space (N = 2^32), deadline ln ln N",
        {{"n_hosts", 4294967296LL}, {"virulence", "1.8/hour"}, {"i0", 1},
         {"defense", "no_patching"}},
        {"closed_form"}, 40.0, 100);
    t["monitoring-ipv4"]["monitors"] = json::object();
    t["monitoring-ipv4"]["kappa"] = {0.5};
    return t;
  }();
  return table;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names;
  for (const auto& [name, doc] : builtins()) names.push_back(name);
  return names;
}

std::optional<json> builtin_scenario(std::string_view name) {
  const auto it = builtins().find(std::string(name));
  if (it == builtins().end()) return std::nullopt;
  return it->second;
}

std::string list_scenarios() {
  std::ostringstream out;
  for (const auto& [name, doc] : builtins()) {
    const ScenarioFile s = parse_scenario(doc);
    const auto& p = s.params;
    std::string engines;
    for (Engine e : s.engines) {
      if (!engines.empty()) engines += ",";
      engines += to_string(e);
    }
    out << fmt::format("{:<22} N={} beta={}/{} defense={}", name, p.n_hosts, p.virulence,
                       to_string(p.unit), to_string(p.defense));
    if (p.defense != Defense::NoPatching) {
      out << fmt::format(" gamma={} p_bar={}", p.gamma, p.p_bar);
    }
    out << fmt::format(" i0={} engines={}\n", p.i0, engines);
    out << fmt::format("{:<22} {}\n", "", s.description);
  }
  return out.str();
}

}  // namespace wormsim
