#include "graphsde/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "graphsde/text.hpp"

namespace graphsde {

namespace {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
};

struct Section {
  std::vector<Entry> entries;
  std::size_t line = 0;
  bool present = false;

  const Entry* find(const std::string& key) const {
    for (const Entry& e : entries)
      if (e.key == key) return &e;
    return nullptr;
  }
  std::vector<const Entry*> all(const std::string& key) const {
    std::vector<const Entry*> out;
    for (const Entry& e : entries)
      if (e.key == key) out.push_back(&e);
    return out;
  }
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, std::size_t line,
                    const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(line, 0, "expected a number for " + what + ", got '" +
                                   s + "'");
  }
}

std::size_t parse_count(const std::string& s, std::size_t line,
                        const std::string& what) {
  double v = parse_number(s, line, what);
  if (v < 0 || v != std::floor(v))
    throw ConfigError(line, 0, what + " must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

Profile parse_profile(const std::string& s, std::size_t line,
                      const std::string& what) {
  if (s.rfind("poly:", 0) == 0) {
    std::vector<double> coeffs;
    for (const std::string& c : split_on(s.substr(5), ','))
      coeffs.push_back(parse_number(trim(c), line, what + " coefficient"));
    return Profile::polynomial(std::move(coeffs));
  }
  if (s.rfind("table:", 0) == 0) {
    std::vector<double> xs, vs;
    for (const std::string& pair : split_on(s.substr(6), ',')) {
      auto parts = split_on(pair, ':');
      if (parts.size() != 2)
        throw ConfigError(line, 0, what + " table entries must be x:value");
      xs.push_back(parse_number(trim(parts[0]), line, what + " table x"));
      vs.push_back(parse_number(trim(parts[1]), line, what + " table value"));
    }
    try {
      return Profile::table(std::move(xs), std::move(vs));
    } catch (const std::exception& ex) {
      throw ConfigError(line, 0, what + ": " + ex.what());
    }
  }
  return Profile::constant(parse_number(s, line, what));
}

/// Splits "id a b length=1 c=poly:1,2" into positional tokens and key=value
/// options.
void split_options(const std::vector<std::string>& tokens,
                   std::vector<std::string>& positional,
                   std::map<std::string, std::pair<std::string, bool>>& options,
                   std::size_t line) {
  for (const std::string& tok : tokens) {
    std::size_t eq = tok.find('=');
    if (eq == std::string::npos) {
      if (!options.empty())
        throw ConfigError(line, 0,
                          "positional token '" + tok + "' after options");
      positional.push_back(tok);
    } else {
      options[tok.substr(0, eq)] = {tok.substr(eq + 1), false};
    }
  }
}

std::string take_option(
    std::map<std::string, std::pair<std::string, bool>>& options,
    const std::string& key, const std::string& fallback, bool required,
    std::size_t line, const std::string& ctx) {
  auto it = options.find(key);
  if (it == options.end()) {
    if (required)
      throw ConfigError(line, 0, ctx + " is missing the field '" + key + "'");
    return fallback;
  }
  it->second.second = true;
  return it->second.first;
}

void reject_unknown_options(
    const std::map<std::string, std::pair<std::string, bool>>& options,
    std::size_t line, const std::string& ctx) {
  for (const auto& [key, val] : options)
    if (!val.second)
      throw ConfigError(line, 0, ctx + " has unknown field '" + key + "'");
}

}  // namespace

ConfigError::ConfigError(std::size_t line, std::size_t column,
                         const std::string& msg)
    : std::runtime_error("line " + std::to_string(line) +
                         (column ? ":" + std::to_string(column) : "") + ": " +
                         msg),
      line_(line),
      column_(column) {}

std::string task_name(Task t) {
  switch (t) {
    case Task::Simulate: return "simulate";
    case Task::Ensemble: return "ensemble";
    case Task::Convergence: return "convergence";
    case Task::Hoelder: return "hoelder";
    case Task::Spectrum: return "spectrum";
    case Task::Validate: return "validate";
  }
  return "?";
}

Task task_from_name(const std::string& name) {
  for (Task t : {Task::Simulate, Task::Ensemble, Task::Convergence,
                 Task::Hoelder, Task::Spectrum, Task::Validate})
    if (task_name(t) == name) return t;
  throw std::invalid_argument("unknown task '" + name + "'");
}

namespace {

Task parse_task_name(const std::string& s, std::size_t line) {
  try {
    return task_from_name(s);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(line, 0, ex.what());
  }
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::DeterministicCN: return "deterministic-cn";
    case Scheme::SemiImplicitTamed: return "semi-implicit-tamed";
    case Scheme::SplitStep: return "split-step";
  }
  return "?";
}

Scheme parse_scheme(const std::string& s, std::size_t line) {
  for (Scheme v :
       {Scheme::DeterministicCN, Scheme::SemiImplicitTamed, Scheme::SplitStep})
    if (scheme_name(v) == s) return v;
  throw ConfigError(line, 0, "unknown scheme '" + s + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text,
                              bool enforce_assumptions) {
  std::map<std::string, Section> sections;
  {
    std::istringstream is(text);
    std::string raw;
    std::size_t lineno = 0;
    Section* current = nullptr;
    std::string current_name;
    while (std::getline(is, raw)) {
      ++lineno;
      std::string line = raw;
      if (auto hash = line.find('#'); hash != std::string::npos)
        line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError(lineno, 0, "malformed section header");
        current_name = trim(line.substr(1, line.size() - 2));
        current = &sections[current_name];
        if (current->present)
          throw ConfigError(lineno, 0,
                            "duplicate section [" + current_name + "]");
        current->present = true;
        current->line = lineno;
        continue;
      }
      std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(lineno, 0, "expected 'key = value'");
      if (!current)
        throw ConfigError(lineno, 0, "key before any [section] header");
      current->entries.push_back(
          {trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
    }
  }

  auto known = {"graph", "reaction", "noise", "initial", "solver", "task"};
  for (const auto& [name, sec] : sections)
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw ConfigError(sec.line, 0, "unknown section [" + name + "]");
  auto reject_unknown_keys = [&](const Section& sec, const char* section,
                                 std::initializer_list<const char*> keys) {
    for (const Entry& e : sec.entries)
      if (std::find_if(keys.begin(), keys.end(), [&](const char* k) {
            return e.key == k;
          }) == keys.end())
        throw ConfigError(e.line, 0, std::string("unknown key '") + e.key +
                                         "' in [" + section + "]");
  };

  ExperimentConfig cfg;

  // ---- [graph] ----------------------------------------------------------
  const Section& gsec = sections["graph"];
  if (!gsec.present) throw ConfigError(1, 0, "missing [graph] section");
  reject_unknown_keys(gsec, "graph", {"vertices", "edge", "M",
                                      "row_sum_margin"});
  const Entry* vent = gsec.find("vertices");
  if (!vent) throw ConfigError(gsec.line, 0, "[graph] is missing 'vertices'");
  cfg.graph.vertices = split_ws(vent->value);
  if (cfg.graph.vertices.empty())
    throw ConfigError(vent->line, 0, "vertex list is empty");
  std::map<std::string, VertexIndex> vertex_index;
  for (std::size_t i = 0; i < cfg.graph.vertices.size(); ++i)
    if (!vertex_index.emplace(cfg.graph.vertices[i], i).second)
      throw ConfigError(vent->line, 0,
                        "duplicate vertex '" + cfg.graph.vertices[i] + "'");

  std::map<std::string, EdgeIndex> edge_index;
  std::map<EdgeIndex, std::size_t> edge_lines;
  for (const Entry* ee : gsec.all("edge")) {
    auto tokens = split_ws(ee->value);
    std::vector<std::string> pos;
    std::map<std::string, std::pair<std::string, bool>> opts;
    split_options(tokens, pos, opts, ee->line);
    if (pos.size() != 3)
      throw ConfigError(ee->line, 0,
                        "edge needs 'id from to' before its options");
    Edge edge;
    edge.id = pos[0];
    auto lookup = [&](const std::string& name) {
      auto it = vertex_index.find(name);
      if (it == vertex_index.end())
        throw ConfigError(ee->line, 0, "unknown vertex '" + name + "'");
      return it->second;
    };
    edge.from = lookup(pos[1]);
    edge.to = lookup(pos[2]);
    edge.length = parse_number(
        take_option(opts, "length", "", true, ee->line, "edge " + edge.id),
        ee->line, "length");
    edge.diffusion = parse_profile(
        take_option(opts, "c", "1", false, ee->line, ""), ee->line, "c");
    edge.drift = parse_profile(take_option(opts, "d", "0", false, ee->line, ""),
                               ee->line, "d");
    edge.potential = parse_profile(
        take_option(opts, "p", "0", false, ee->line, ""), ee->line, "p");
    reject_unknown_options(opts, ee->line, "edge " + edge.id);
    if (!edge_index.emplace(edge.id, cfg.graph.edges.size()).second)
      throw ConfigError(ee->line, 0, "duplicate edge id '" + edge.id + "'");
    edge_lines[cfg.graph.edges.size()] = ee->line;
    cfg.graph.edges.push_back(std::move(edge));
  }
  if (cfg.graph.edges.empty())
    throw ConfigError(gsec.line, 0, "[graph] has no edges");

  if (const Entry* rm = gsec.find("row_sum_margin")) {
    cfg.validation.row_sum_margin =
        parse_number(rm->value, rm->line, "row_sum_margin");
    if (!(cfg.validation.row_sum_margin >= 0.0))
      throw ConfigError(rm->line, 0, "row_sum_margin must be >= 0");
  }

  const Entry* ment = gsec.find("M");
  if (!ment) throw ConfigError(gsec.line, 0, "[graph] is missing 'M'");
  {
    auto nums = split_ws(ment->value);
    const std::size_t n = cfg.graph.vertices.size();
    if (nums.size() != n * n)
      throw ConfigError(ment->line, 0,
                        "M must have n*n = " + std::to_string(n * n) +
                            " entries, got " + std::to_string(nums.size()));
    cfg.graph.coupling.resize(static_cast<Eigen::Index>(n),
                              static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        cfg.graph.coupling(static_cast<Eigen::Index>(i),
                           static_cast<Eigen::Index>(k)) =
            parse_number(nums[i * n + k], ment->line, "M entry");
  }

  // ---- [reaction] --------------------------------------------------------
  const Section& rsec = sections["reaction"];
  if (rsec.present) {
    reject_unknown_keys(rsec, "reaction",
                        {"preset", "beta", "a", "edge", "modulation",
                         "modulation_range"});
    std::string preset = "none";
    if (const Entry* p = rsec.find("preset")) preset = p->value;
    double beta = 1.0, a = 0.5;
    if (const Entry* b = rsec.find("beta"))
      beta = parse_number(b->value, b->line, "beta");
    if (const Entry* av = rsec.find("a"))
      a = parse_number(av->value, av->line, "a");
    if (preset == "allen-cahn") {
      cfg.reaction = ReactionSpec::allen_cahn(cfg.graph.num_edges(), beta);
    } else if (preset == "fhn") {
      if (!(a > 0.0 && a < 1.0))
        throw ConfigError(rsec.find("a") ? rsec.find("a")->line : rsec.line, 0,
                          "fhn parameter a must lie in (0,1)");
      cfg.reaction = ReactionSpec::fitzhugh_nagumo(cfg.graph.num_edges(), a);
    } else if (preset != "none") {
      throw ConfigError(rsec.find("preset")->line, 0,
                        "unknown reaction preset '" + preset + "'");
    }

    auto redges = rsec.all("edge");
    if (!redges.empty() && preset == "none" &&
        redges.size() != cfg.graph.num_edges())
      throw ConfigError(redges.front()->line, 0,
                        "reaction edges must cover every graph edge "
                        "(or start from a preset)");
    if (!redges.empty() && cfg.reaction.edges.empty())
      cfg.reaction.edges.resize(cfg.graph.num_edges());
    for (const Entry* re : redges) {
      auto tokens = split_ws(re->value);
      std::vector<std::string> pos;
      std::map<std::string, std::pair<std::string, bool>> opts;
      split_options(tokens, pos, opts, re->line);
      if (pos.size() != 1)
        throw ConfigError(re->line, 0, "reaction edge needs 'id' first");
      auto it = edge_index.find(pos[0]);
      if (it == edge_index.end())
        throw ConfigError(re->line, 0, "unknown edge '" + pos[0] + "'");
      EdgeReaction er;
      er.k = static_cast<unsigned>(parse_count(
          take_option(opts, "k", "", true, re->line, "reaction edge"),
          re->line, "k"));
      if (er.k == 0)
        throw ConfigError(re->line, 0, "degree parameter k must be >= 1");
      er.leading = parse_profile(
          take_option(opts, "leading", "1", false, re->line, ""), re->line,
          "leading");
      std::string coeffs =
          take_option(opts, "coeffs", "", false, re->line, "");
      if (!coeffs.empty())
        for (const std::string& c : split_on(coeffs, ';'))
          er.lower.push_back(parse_profile(trim(c), re->line, "coeffs"));
      if (er.lower.size() > 2 * er.k + 1)
        throw ConfigError(re->line, 0,
                          "too many lower coefficients for degree 2k+1");
      reject_unknown_options(opts, re->line, "reaction edge " + pos[0]);
      cfg.reaction.edges[it->second] = std::move(er);
    }

    if (const Entry* mo = rsec.find("modulation")) {
      if (mo->value == "none")
        cfg.reaction.modulation = Modulation::None;
      else if (mo->value == "per-path")
        cfg.reaction.modulation = Modulation::PerPath;
      else if (mo->value == "per-step")
        cfg.reaction.modulation = Modulation::PerStep;
      else
        throw ConfigError(mo->line, 0,
                          "modulation must be none|per-path|per-step");
    }
    if (const Entry* mr = rsec.find("modulation_range")) {
      auto nums = split_ws(mr->value);
      if (nums.size() != 2)
        throw ConfigError(mr->line, 0, "modulation_range needs 'low high'");
      cfg.reaction.modulation_low =
          parse_number(nums[0], mr->line, "modulation low");
      cfg.reaction.modulation_high =
          parse_number(nums[1], mr->line, "modulation high");
      if (!(cfg.reaction.modulation_low > 0.0) ||
          cfg.reaction.modulation_high < cfg.reaction.modulation_low)
        throw ConfigError(mr->line, 0,
                          "modulation_range needs 0 < low <= high");
    }
  }

  // ---- [noise] -----------------------------------------------------------
  const Section& nsec = sections["noise"];
  if (nsec.present) {
    reject_unknown_keys(nsec, "noise", {"kind", "family", "sigma", "mode"});
    if (const Entry* k = nsec.find("kind")) {
      if (k->value == "white")
        cfg.noise.kind = NoiseKind::White;
      else if (k->value == "coloured")
        cfg.noise.kind = NoiseKind::Coloured;
      else
        throw ConfigError(k->line, 0, "noise kind must be white|coloured");
    }
    if (const Entry* f = nsec.find("family")) {
      if (f->value == "constant")
        cfg.noise.family = NoiseFamily::Constant;
      else if (f->value == "linear")
        cfg.noise.family = NoiseFamily::Linear;
      else if (f->value == "saturating")
        cfg.noise.family = NoiseFamily::Saturating;
      else
        throw ConfigError(f->line, 0,
                          "noise family must be constant|linear|saturating");
    }
    if (const Entry* s = nsec.find("sigma"))
      cfg.noise.sigma = parse_number(s->value, s->line, "sigma");
    for (const Entry* me : nsec.all("mode")) {
      auto tokens = split_ws(me->value);
      std::vector<std::string> pos;
      std::map<std::string, std::pair<std::string, bool>> opts;
      split_options(tokens, pos, opts, me->line);
      if (pos.size() != 1)
        throw ConfigError(me->line, 0, "noise mode needs 'edge' first");
      auto it = edge_index.find(pos[0]);
      if (it == edge_index.end())
        throw ConfigError(me->line, 0, "unknown edge '" + pos[0] + "'");
      ColouredMode mode;
      mode.edge = it->second;
      mode.amplitude = parse_number(
          take_option(opts, "amplitude", "", true, me->line, "noise mode"),
          me->line, "amplitude");
      mode.profile = parse_profile(
          take_option(opts, "profile", "1", false, me->line, ""), me->line,
          "profile");
      reject_unknown_options(opts, me->line, "noise mode");
      cfg.noise.modes.push_back(std::move(mode));
    }
    if (cfg.noise.kind == NoiseKind::White && !cfg.noise.modes.empty())
      throw ConfigError(nsec.line, 0, "white noise takes no modes");
  }
  if (!cfg.reaction.trivial()) {
    auto [k, bigk] = cfg.reaction.exponents();
    cfg.noise.growth_ratio =
        static_cast<double>(k) / static_cast<double>(bigk);
  }

  // ---- [initial] ---------------------------------------------------------
  cfg.initial.assign(cfg.graph.num_edges(), Profile::constant(0.0));
  const Section& isec = sections["initial"];
  if (isec.present) {
    reject_unknown_keys(isec, "initial", {"value", "edge"});
    if (const Entry* v = isec.find("value")) {
      Profile p = parse_profile(v->value, v->line, "initial value");
      cfg.initial.assign(cfg.graph.num_edges(), p);
    }
    for (const Entry* ie : isec.all("edge")) {
      auto tokens = split_ws(ie->value);
      if (tokens.size() != 2)
        throw ConfigError(ie->line, 0, "initial edge needs 'id profile'");
      auto it = edge_index.find(tokens[0]);
      if (it == edge_index.end())
        throw ConfigError(ie->line, 0, "unknown edge '" + tokens[0] + "'");
      cfg.initial[it->second] =
          parse_profile(tokens[1], ie->line, "initial profile");
    }
  }

  // ---- [solver] ----------------------------------------------------------
  const Section& ssec = sections["solver"];
  if (ssec.present) {
    for (const Entry& e : ssec.entries) {
      if (e.key == "T")
        cfg.solver.T = parse_number(e.value, e.line, "T");
      else if (e.key == "dt")
        cfg.solver.dt = parse_number(e.value, e.line, "dt");
      else if (e.key == "h")
        cfg.mesh_h = parse_number(e.value, e.line, "h");
      else if (e.key == "scheme")
        cfg.solver.scheme = parse_scheme(e.value, e.line);
      else if (e.key == "seed")
        cfg.solver.seed = static_cast<std::uint64_t>(
            parse_count(e.value, e.line, "seed"));
      else if (e.key == "taming")
        cfg.solver.taming = parse_number(e.value, e.line, "taming");
      else if (e.key == "n_paths")
        cfg.solver.n_paths = parse_count(e.value, e.line, "n_paths");
      else if (e.key == "output_stride")
        cfg.solver.output_stride =
            std::max<std::size_t>(1, parse_count(e.value, e.line, "stride"));
      else if (e.key == "probes") {
        for (const std::string& tok : split_ws(e.value)) {
          auto parts = split_on(tok, ':');
          if (parts.size() != 2)
            throw ConfigError(e.line, 0, "probes must be edge:x pairs");
          auto it = edge_index.find(parts[0]);
          if (it == edge_index.end())
            throw ConfigError(e.line, 0, "unknown edge '" + parts[0] + "'");
          double x = parse_number(parts[1], e.line, "probe x");
          if (x < 0.0 || x > cfg.graph.edges[it->second].length)
            throw ConfigError(e.line, 0, "probe x outside [0, length]");
          cfg.probes.push_back({parts[0], x});
        }
      } else if (e.key == "moment_orders") {
        cfg.solver.moment_orders.clear();
        for (const std::string& tok : split_ws(e.value))
          cfg.solver.moment_orders.push_back(
              parse_number(tok, e.line, "moment order"));
      } else if (e.key == "max_blowup_rate")
        cfg.max_blowup_rate = parse_number(e.value, e.line, "max_blowup_rate");
      else
        throw ConfigError(e.line, 0, "unknown solver key '" + e.key + "'");
    }
    if (!(cfg.solver.dt > 0.0))
      throw ConfigError(ssec.line, 0, "dt must be positive");
    if (cfg.solver.T < cfg.solver.dt)
      throw ConfigError(ssec.line, 0, "T must be >= dt");
    if (!(cfg.mesh_h > 0.0))
      throw ConfigError(ssec.line, 0, "h must be positive");
    if (cfg.solver.n_paths == 0)
      throw ConfigError(ssec.line, 0, "n_paths must be >= 1");
  }

  // ---- [task] ------------------------------------------------------------
  const Section& tsec = sections["task"];
  if (tsec.present) {
    for (const Entry& e : tsec.entries) {
      if (e.key == "name")
        cfg.task = parse_task_name(e.value, e.line);
      else if (e.key == "levels")
        cfg.convergence_levels =
            std::max<std::size_t>(3, parse_count(e.value, e.line, "levels"));
      else if (e.key == "count")
        cfg.spectrum_count =
            std::max<std::size_t>(1, parse_count(e.value, e.line, "count"));
      else if (e.key == "lags") {
        cfg.hoelder_lags.clear();
        for (const std::string& tok : split_ws(e.value))
          cfg.hoelder_lags.push_back(parse_count(tok, e.line, "lag"));
      } else
        throw ConfigError(e.line, 0, "unknown task key '" + e.key + "'");
    }
  }

  // ---- semantic validation ------------------------------------------------
  if (cfg.solver.scheme == Scheme::DeterministicCN &&
      (!cfg.reaction.trivial() || !cfg.noise.trivial()))
    throw ConfigError(ssec.present ? ssec.line : 1, 0,
                      "scheme deterministic-cn requires zero reaction and "
                      "zero noise");
  if (enforce_assumptions) {
    ValidationReport report = validate_graph(cfg.graph, cfg.validation);
    if (!report.valid()) {
      const Violation& v = report.violations.front();
      std::size_t where = v.code.rfind("coupling.", 0) == 0
                              ? ment->line
                              : gsec.line;
      throw ConfigError(where, 0,
                        v.code + ": " + v.message +
                            (report.violations.size() > 1
                                 ? " (+" +
                                       std::to_string(
                                           report.violations.size() - 1) +
                                       " more)"
                                 : ""));
    }
  }
  return cfg;
}

namespace {

const char* modulation_name(Modulation m) {
  switch (m) {
    case Modulation::None: return "none";
    case Modulation::PerPath: return "per-path";
    case Modulation::PerStep: return "per-step";
  }
  return "?";
}

const char* family_name(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::Constant: return "constant";
    case NoiseFamily::Linear: return "linear";
    case NoiseFamily::Saturating: return "saturating";
  }
  return "?";
}

}  // namespace

std::string normalize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[graph]\n";
  os << "vertices =";
  for (const std::string& v : cfg.graph.vertices) os << " " << v;
  os << "\n";
  for (const Edge& e : cfg.graph.edges) {
    os << "edge = " << e.id << " " << cfg.graph.vertices[e.from] << " "
       << cfg.graph.vertices[e.to] << " length=" << fmt_g17(e.length)
       << " c=" << e.diffusion.describe() << " d=" << e.drift.describe()
       << " p=" << e.potential.describe() << "\n";
  }
  os << "M =";
  for (Eigen::Index i = 0; i < cfg.graph.coupling.rows(); ++i)
    for (Eigen::Index k = 0; k < cfg.graph.coupling.cols(); ++k)
      os << " " << fmt_g17(cfg.graph.coupling(i, k));
  os << "\n";
  os << "row_sum_margin = " << fmt_g17(cfg.validation.row_sum_margin) << "\n";

  if (!cfg.reaction.trivial()) {
    os << "\n[reaction]\n";
    for (std::size_t e = 0; e < cfg.reaction.edges.size(); ++e) {
      const EdgeReaction& r = cfg.reaction.edges[e];
      os << "edge = " << cfg.graph.edges[e].id << " k=" << r.k
         << " leading=" << r.leading.describe() << " coeffs=";
      for (std::size_t j = 0; j < r.lower.size(); ++j)
        os << (j ? ";" : "") << r.lower[j].describe();
      os << "\n";
    }
    os << "modulation = " << modulation_name(cfg.reaction.modulation) << "\n";
    if (cfg.reaction.modulation != Modulation::None)
      os << "modulation_range = " << fmt_g17(cfg.reaction.modulation_low)
         << " " << fmt_g17(cfg.reaction.modulation_high) << "\n";
  }

  os << "\n[noise]\n";
  os << "kind = "
     << (cfg.noise.kind == NoiseKind::White ? "white" : "coloured") << "\n";
  os << "family = " << family_name(cfg.noise.family) << "\n";
  os << "sigma = " << fmt_g17(cfg.noise.sigma) << "\n";
  for (const ColouredMode& m : cfg.noise.modes)
    os << "mode = " << cfg.graph.edges[m.edge].id
       << " amplitude=" << fmt_g17(m.amplitude)
       << " profile=" << m.profile.describe() << "\n";

  os << "\n[initial]\n";
  for (std::size_t e = 0; e < cfg.initial.size(); ++e)
    os << "edge = " << cfg.graph.edges[e].id << " "
       << cfg.initial[e].describe() << "\n";

  os << "\n[solver]\n";
  os << "T = " << fmt_g17(cfg.solver.T) << "\n";
  os << "dt = " << fmt_g17(cfg.solver.dt) << "\n";
  os << "h = " << fmt_g17(cfg.mesh_h) << "\n";
  os << "scheme = " << scheme_name(cfg.solver.scheme) << "\n";
  os << "seed = " << cfg.solver.seed << "\n";
  os << "taming = " << fmt_g17(cfg.solver.taming) << "\n";
  os << "n_paths = " << cfg.solver.n_paths << "\n";
  os << "output_stride = " << cfg.solver.output_stride << "\n";
  if (!cfg.probes.empty()) {
    os << "probes =";
    for (const ProbeSpec& p : cfg.probes)
      os << " " << p.edge_id << ":" << fmt_g17(p.x);
    os << "\n";
  }
  os << "moment_orders =";
  for (double q : cfg.solver.moment_orders) os << " " << fmt_g17(q);
  os << "\n";
  os << "max_blowup_rate = " << fmt_g17(cfg.max_blowup_rate) << "\n";

  os << "\n[task]\n";
  os << "name = " << task_name(cfg.task) << "\n";
  os << "levels = " << cfg.convergence_levels << "\n";
  os << "count = " << cfg.spectrum_count << "\n";
  os << "lags =";
  for (std::size_t l : cfg.hoelder_lags) os << " " << l;
  os << "\n";
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  return hex64(fnv1a64(normalize_config(cfg)));
}

}  // namespace graphsde
