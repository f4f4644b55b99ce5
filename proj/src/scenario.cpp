#include "splitobs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace splitobs {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SchemaError("at " + path + ": " + what);
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const char* k : required)
    if (!j.contains(k)) fail(path, std::string("missing required key '") + k + "'");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    bool known = false;
    for (const char* k : required) known = known || key == k;
    for (const char* k : optional) known = known || key == k;
    if (!known) fail(path, "unknown key '" + key + "'");
  }
}

double get_num(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string get_str(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Vector get_vector(const json& j, const std::string& path, int expect = -1) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vector v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k)
    v(static_cast<int>(k)) = get_num(j[k], path + "[" + std::to_string(k) + "]");
  if (expect >= 0 && v.size() != expect)
    fail(path, "expected " + std::to_string(expect) + " entries, got " +
                   std::to_string(v.size()));
  return v;
}

Matrix get_matrix(const json& j, const std::string& path, int expect_cols = -1) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
  const json& first = j[0];
  if (!first.is_array()) fail(path, "expected rows (arrays of numbers)");
  const int cols = expect_cols >= 0 ? expect_cols : static_cast<int>(first.size());
  Matrix M(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const json& row = j[r];
    const std::string rpath = path + " row " + std::to_string(r + 1);
    if (!row.is_array()) fail(rpath, "expected an array of numbers");
    if (static_cast<int>(row.size()) != cols)
      fail(rpath, "has length " + std::to_string(row.size()) + ", expected " +
                      std::to_string(cols));
    for (std::size_t c = 0; c < row.size(); ++c)
      M(static_cast<int>(r), static_cast<int>(c)) =
          get_num(row[c], rpath + "[" + std::to_string(c) + "]");
  }
  return M;
}

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (int r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (int k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

const char* kKnownErrors[] = {
    "NotObservable",      "SolverDiverged",   "MissingSelfLoop",
    "NotIrreducible",     "NotSymmetricGraph", "NotDoublyStochastic",
    "IntertwiningViolated", "CouplingDegenerate", "EmptyFamily",
    "DimensionMismatch",  "FaultBreaksAssumptions", "OutOfHorizon",
    "ToleranceNotMet",    "InsufficientData", "SchemaError",
    "FileNotFound"};

void parse_plant(const json& j, ScenarioDoc& doc) {
  check_keys(j, "$.plant", {"time", "A", "C"}, {"T"});
  const std::string kind = get_str(j["time"], "$.plant.time");
  Plant& plant = doc.scenario.plant;
  if (kind == "continuous")
    plant.time_kind = TimeKind::continuous;
  else if (kind == "discrete")
    plant.time_kind = TimeKind::discrete;
  else
    fail("$.plant.time", "expected \"continuous\" or \"discrete\"");

  plant.A = get_matrix(j["A"], "$.plant.A");
  if (plant.A.rows() != plant.A.cols())
    fail("$.plant.A", "must be square, got " + std::to_string(plant.A.rows()) + "x" +
                          std::to_string(plant.A.cols()));
  const int n = static_cast<int>(plant.A.rows());

  if (!j["C"].is_array() || j["C"].empty())
    fail("$.plant.C", "expected one output matrix per agent");
  for (std::size_t i = 0; i < j["C"].size(); ++i)
    plant.C.push_back(
        get_matrix(j["C"][i], "$.plant.C[" + std::to_string(i) + "]", n));

  if (j.contains("T")) {
    if (plant.time_kind != TimeKind::discrete)
      fail("$.plant.T", "sample period applies to discrete plants only");
    plant.sample_period = get_num(j["T"], "$.plant.T");
    if (plant.sample_period <= 0.0) fail("$.plant.T", "must be positive");
  }
}

void parse_graphs(const json& j, ScenarioDoc& doc) {
  if (!j.is_array() || j.empty())
    fail("$.graphs", "expected a nonempty array of graphs");
  const int m = doc.scenario.plant.m();
  for (std::size_t gi = 0; gi < j.size(); ++gi) {
    const std::string gpath = "$.graphs[" + std::to_string(gi) + "]";
    check_keys(j[gi], gpath, {"arcs"}, {});
    const json& arcs = j[gi]["arcs"];
    if (!arcs.is_array()) fail(gpath + ".arcs", "expected an array of [from, to] pairs");
    std::vector<std::pair<int, int>> list;
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      const std::string apath = gpath + ".arcs[" + std::to_string(a) + "]";
      const json& arc = arcs[a];
      if (!arc.is_array() || arc.size() != 2)
        fail(apath, "expected a [from, to] pair");
      const long from = get_int(arc[0], apath + "[0]");
      const long to = get_int(arc[1], apath + "[1]");
      if (from < 1 || from > m || to < 1 || to > m)
        fail(apath, "vertex ids are 1-based in 1.." + std::to_string(m));
      if (from == to) {
        doc.warnings.push_back("graph " + std::to_string(gi + 1) +
                               ": explicit self-loop at vertex " +
                               std::to_string(from) +
                               " ignored (self-loops are implicit)");
        continue;
      }
      list.emplace_back(static_cast<int>(from - 1), static_cast<int>(to - 1));
    }
    NeighborGraph g = make_graph(m, list);
    doc.raw_graphs.push_back(g);
    doc.scenario.family.push_back(make_snapshot(g));
  }
}

void parse_sim(const json& j, ScenarioDoc& doc) {
  check_keys(j, "$.sim", {"x0", "horizon"}, {"xi0", "g0", "adaptive", "h", "faults"});
  Scenario& sc = doc.scenario;
  const int n = sc.plant.n(), m = sc.plant.m();
  const bool discrete = sc.plant.time_kind == TimeKind::discrete;

  sc.x0 = get_vector(j["x0"], "$.sim.x0", n);
  sc.horizon = get_num(j["horizon"], "$.sim.horizon");
  if (sc.horizon <= 0.0) fail("$.sim.horizon", "must be positive");
  if (discrete && std::abs(sc.horizon - std::llround(sc.horizon)) > 1e-9)
    fail("$.sim.horizon", "must be an integer event count for discrete plants");

  if (j.contains("xi0")) {
    const json& xi = j["xi0"];
    if (!xi.is_array() || static_cast<int>(xi.size()) != m)
      fail("$.sim.xi0", "expected one initial estimate per agent (" +
                            std::to_string(m) + ")");
    for (int i = 0; i < m; ++i)
      sc.xi0.push_back(get_vector(xi[i], "$.sim.xi0[" + std::to_string(i) + "]", n));
  } else {
    sc.xi0.assign(m, Vector::Zero(n));
  }

  if (j.contains("adaptive")) {
    sc.adaptive = get_bool(j["adaptive"], "$.sim.adaptive");
    if (sc.adaptive && discrete)
      fail("$.sim.adaptive", "adaptive mode applies to continuous plants only");
  }
  if (j.contains("g0")) {
    if (!sc.adaptive) fail("$.sim.g0", "g0 applies to adaptive mode only");
    sc.g0 = get_vector(j["g0"], "$.sim.g0", m);
    for (int i = 0; i < m; ++i)
      if (sc.g0(i) < 0.0) fail("$.sim.g0", "entries must be nonnegative");
  } else if (sc.adaptive) {
    fail("$.sim", "adaptive mode requires g0");
  }

  if (j.contains("h")) {
    if (discrete) fail("$.sim.h", "grid step applies to continuous plants only");
    sc.h = get_num(j["h"], "$.sim.h");
    if (sc.h <= 0.0) fail("$.sim.h", "must be positive");
  }

  if (j.contains("faults")) {
    const json& faults = j["faults"];
    if (!faults.is_array()) fail("$.sim.faults", "expected an array of fault events");
    if (sc.adaptive && !faults.empty())
      fail("$.sim.faults", "faults are not supported in adaptive mode");
    for (std::size_t k = 0; k < faults.size(); ++k) {
      const std::string fpath = "$.sim.faults[" + std::to_string(k) + "]";
      check_keys(faults[k], fpath, {"time"}, {"drop_arc", "drop_agent"});
      FaultEvent ev;
      ev.time = get_num(faults[k]["time"], fpath + ".time");
      if (ev.time <= 0.0 || ev.time >= sc.horizon)
        fail(fpath + ".time", "must lie strictly inside (0, horizon)");
      if (discrete && std::abs(ev.time - std::llround(ev.time)) > 1e-9)
        fail(fpath + ".time", "must be an integer event index for discrete plants");
      const bool has_arc = faults[k].contains("drop_arc");
      const bool has_agent = faults[k].contains("drop_agent");
      if (has_arc == has_agent)
        fail(fpath, "needs exactly one of drop_arc or drop_agent");
      if (has_arc) {
        const json& arc = faults[k]["drop_arc"];
        if (!arc.is_array() || arc.size() != 2)
          fail(fpath + ".drop_arc", "expected a [from, to] pair");
        const long from = get_int(arc[0], fpath + ".drop_arc[0]");
        const long to = get_int(arc[1], fpath + ".drop_arc[1]");
        if (from < 1 || from > m || to < 1 || to > m)
          fail(fpath + ".drop_arc", "vertex ids are 1-based in 1.." + std::to_string(m));
        if (from == to) fail(fpath + ".drop_arc", "self-loops cannot be removed");
        ev.kind = FaultKind::remove_arc;
        ev.from = static_cast<int>(from - 1);
        ev.to = static_cast<int>(to - 1);
      } else {
        const long agent = get_int(faults[k]["drop_agent"], fpath + ".drop_agent");
        if (agent < 1 || agent > m)
          fail(fpath + ".drop_agent", "agent ids are 1-based in 1.." + std::to_string(m));
        ev.kind = FaultKind::remove_agent;
        ev.agent = static_cast<int>(agent - 1);
      }
      sc.faults.push_back(ev);
    }
  }
}

void parse_signal(const json& j, ScenarioDoc& doc,
                  std::optional<std::uint64_t> seed_override) {
  check_keys(j, "$.signal", {"kind"},
             {"tau_D", "delta0", "min_step", "breakpoints", "seed"});
  Scenario& sc = doc.scenario;
  const int fam = static_cast<int>(sc.family.size());
  const bool discrete = sc.plant.time_kind == TimeKind::discrete;
  doc.signal_kind = get_str(j["kind"], "$.signal.kind");
  doc.spec.integer_times = discrete;

  auto forbid = [&](const char* key) {
    if (j.contains(key))
      fail(std::string("$.signal.") + key,
           "does not apply to kind \"" + doc.signal_kind + "\"");
  };

  if (doc.signal_kind == "fixed") {
    forbid("tau_D");
    forbid("delta0");
    forbid("min_step");
    forbid("breakpoints");
    forbid("seed");
    if (fam != 1)
      fail("$.signal.kind", "kind \"fixed\" requires exactly one graph, got " +
                                std::to_string(fam));
    sc.signal.breakpoints = {0.0};
    sc.signal.values = {0};
    sc.signal.horizon = sc.horizon;
    sc.signal.kind = SwitchKind::arbitrary;
    doc.spec.kind = SwitchKind::arbitrary;
    doc.spec.min_step = sc.horizon;
    return;
  }

  if (doc.signal_kind == "dwell" || doc.signal_kind == "avg_dwell") {
    forbid("min_step");
    if (!j.contains("tau_D")) fail("$.signal", "missing required key 'tau_D'");
    doc.spec.tau_D = get_num(j["tau_D"], "$.signal.tau_D");
    if (doc.spec.tau_D <= 0.0) fail("$.signal.tau_D", "must be positive");
    if (doc.signal_kind == "dwell") {
      forbid("delta0");
      doc.spec.kind = SwitchKind::dwell;
    } else {
      if (!j.contains("delta0")) fail("$.signal", "missing required key 'delta0'");
      doc.spec.delta0 = get_num(j["delta0"], "$.signal.delta0");
      if (doc.spec.delta0 < 0.0) fail("$.signal.delta0", "must be nonnegative");
      doc.spec.kind = SwitchKind::avg_dwell;
    }
  } else if (doc.signal_kind == "arbitrary") {
    forbid("tau_D");
    forbid("delta0");
    if (!j.contains("min_step")) fail("$.signal", "missing required key 'min_step'");
    doc.spec.min_step = get_num(j["min_step"], "$.signal.min_step");
    if (doc.spec.min_step <= 0.0) fail("$.signal.min_step", "must be positive");
    doc.spec.kind = SwitchKind::arbitrary;
  } else {
    fail("$.signal.kind",
         "expected \"fixed\", \"dwell\", \"avg_dwell\" or \"arbitrary\"");
  }

  const bool has_bp = j.contains("breakpoints");
  const bool has_seed = j.contains("seed") || seed_override.has_value();
  if (has_bp && j.contains("seed"))
    fail("$.signal", "breakpoints and seed are mutually exclusive");
  if (!has_bp && !has_seed)
    fail("$.signal", "needs either explicit breakpoints or a seed");

  if (has_bp && !seed_override) {
    const json& bps = j["breakpoints"];
    if (!bps.is_array() || bps.empty())
      fail("$.signal.breakpoints", "expected a nonempty array of [t, graph] pairs");
    for (std::size_t k = 0; k < bps.size(); ++k) {
      const std::string bpath = "$.signal.breakpoints[" + std::to_string(k) + "]";
      const json& bp = bps[k];
      if (!bp.is_array() || bp.size() != 2)
        fail(bpath, "expected a [t, graph] pair");
      const double t = get_num(bp[0], bpath + "[0]");
      const long gid = get_int(bp[1], bpath + "[1]");
      if (gid < 1 || gid > fam)
        fail(bpath + "[1]", "graph ids are 1-based in 1.." + std::to_string(fam));
      if (discrete && std::abs(t - std::llround(t)) > 1e-9)
        fail(bpath + "[0]", "must be an integer event index for discrete plants");
      sc.signal.breakpoints.push_back(t);
      sc.signal.values.push_back(static_cast<int>(gid - 1));
    }
    sc.signal.horizon = sc.horizon;
    sc.signal.kind = doc.spec.kind;
    sc.signal.tau_D = doc.spec.tau_D;
    sc.signal.delta0 = doc.spec.delta0;
    SignalCheck chk = validate(sc.signal, doc.spec);
    if (!chk.valid)
      fail("$.signal.breakpoints", "invalid signal at t=" +
                                       std::to_string(chk.violation_time) + ": " +
                                       chk.message);
  } else {
    std::uint64_t seed = seed_override
                             ? *seed_override
                             : static_cast<std::uint64_t>(
                                   get_int(j["seed"], "$.signal.seed"));
    doc.signal_seed = seed;
    sc.signal = generate(doc.spec, fam, sc.horizon, seed);
  }
}

void parse_design(const json& j, ScenarioDoc& doc) {
  check_keys(j, "$.design", {"lambda", "mode"}, {"K", "g", "q", "q_method", "regime"});
  Scenario& sc = doc.scenario;
  const int m = sc.plant.m();
  const bool discrete = sc.plant.time_kind == TimeKind::discrete;

  const double lambda = get_num(j["lambda"], "$.design.lambda");
  if (discrete) {
    if (lambda <= 0.0 || lambda >= 1.0)
      fail("$.design.lambda", "discrete rate must lie in (0, 1)");
  } else if (lambda <= 0.0) {
    fail("$.design.lambda", "continuous rate must be positive");
  }

  const std::string mode = get_str(j["mode"], "$.design.mode");
  if (mode != "synthesize" && mode != "use-given")
    fail("$.design.mode", "expected \"synthesize\" or \"use-given\"");
  doc.design_synthesized = mode == "synthesize";

  if (!joint_observability(sc.plant).jointly_observable)
    throw NotObservable("design: the plant is not jointly observable");

  std::vector<AgentDecomposition> decs;
  for (int i = 0; i < m; ++i) decs.push_back(decompose_agent(sc.plant, i));

  if (mode == "use-given") {
    if (!j.contains("K")) fail("$.design", "mode use-given requires K");
    const json& K = j["K"];
    if (!K.is_array() || static_cast<int>(K.size()) != m)
      fail("$.design.K", "expected one gain matrix per agent (" + std::to_string(m) +
                             ")");
    for (int i = 0; i < m; ++i) {
      const std::string kpath = "$.design.K[" + std::to_string(i) + "]";
      Matrix Ki = get_matrix(K[i], kpath, -1);
      if (Ki.rows() != sc.plant.n() || Ki.cols() != sc.plant.C[i].rows())
        fail(kpath, "expected " + std::to_string(sc.plant.n()) + "x" +
                        std::to_string(sc.plant.C[i].rows()) + ", got " +
                        std::to_string(Ki.rows()) + "x" + std::to_string(Ki.cols()));
      const double scale = std::max(1.0, Ki.norm());
      if ((decs[i].P * Ki).norm() > 1e-9 * scale)
        fail(kpath, "gain must vanish on agent " + std::to_string(i + 1) +
                        "'s unobservable directions");
      decs[i] = set_injection_gain(decs[i], decs[i].Q * Ki);
      if ((decs[i].K - Ki).norm() > 1e-9 * scale)
        fail(kpath, "gain does not reconstruct through the decomposition");
      doc.design_K.push_back(std::move(Ki));
    }
  } else {
    if (j.contains("K")) fail("$.design.K", "K conflicts with mode \"synthesize\"");
    for (int i = 0; i < m; ++i) {
      decs[i] = synth_gain(decs[i], lambda, sc.plant.time_kind);
      doc.design_K.push_back(decs[i].K);
    }
  }

  if (discrete) {
    auto forbid = [&](const char* key) {
      if (j.contains(key))
        fail(std::string("$.design.") + key, "applies to continuous plants only");
    };
    forbid("g");
    forbid("regime");
    DiscreteDesign d;
    d.rate = lambda;
    d.decs = decs;
    if (j.contains("q_method")) {
      doc.q_method = get_str(j["q_method"], "$.design.q_method");
      if (doc.q_method != "weighted" && doc.q_method != "mixed")
        fail("$.design.q_method", "expected \"weighted\" or \"mixed\"");
    }
    d.method = doc.q_method == "mixed" ? QMethod::mixed : QMethod::weighted;
    if (j.contains("q")) {
      const long q = get_int(j["q"], "$.design.q");
      if (q < 1) fail("$.design.q", "must be a positive integer");
      d.q = static_cast<int>(q);
    } else {
      StackedDecomposition st = stack(decs);
      QCertificate cert = d.method == QMethod::mixed
                              ? choose_q_mixed(st, sc.family, lambda)
                              : choose_q_weighted(st, sc.family, lambda);
      d.q = cert.q;
      d.p = cert.p;
      d.p_bar = cert.p_bar;
    }
    sc.ddesign = std::move(d);
    return;
  }

  auto forbid_d = [&](const char* key) {
    if (j.contains(key))
      fail(std::string("$.design.") + key, "applies to discrete plants only");
  };
  forbid_d("q");
  forbid_d("q_method");

  ContinuousDesign d;
  d.rate = lambda;
  d.decs = decs;
  d.tau_D = doc.spec.tau_D;
  d.delta0 = doc.spec.delta0;

  if (sc.adaptive) {
    auto forbid_a = [&](const char* key) {
      if (j.contains(key))
        fail(std::string("$.design.") + key, "has no effect in adaptive mode");
    };
    forbid_a("g");
    forbid_a("regime");
    d.regime = Regime::fixed;
    doc.regime = Regime::fixed;
    sc.cdesign = std::move(d);
    return;
  }

  if (j.contains("regime")) {
    const std::string reg = get_str(j["regime"], "$.design.regime");
    if (reg == "fixed")
      doc.regime = Regime::fixed;
    else if (reg == "dwell")
      doc.regime = Regime::dwell;
    else if (reg == "arbitrary")
      doc.regime = Regime::arbitrary;
    else
      fail("$.design.regime", "expected \"fixed\", \"dwell\" or \"arbitrary\"");
  } else {
    if (doc.signal_kind == "fixed")
      doc.regime = Regime::fixed;
    else if (doc.signal_kind == "arbitrary")
      doc.regime = Regime::arbitrary;
    else
      doc.regime = Regime::dwell;
  }
  if (doc.regime == Regime::fixed && sc.family.size() != 1)
    fail("$.design.regime", "fixed regime requires exactly one graph");
  if (doc.regime == Regime::dwell && doc.spec.tau_D <= 0.0)
    fail("$.design.regime", "dwell regime requires a dwell/avg_dwell signal");
  d.regime = doc.regime;

  StackedDecomposition st = stack(decs);
  if (j.contains("g")) {
    d.g = get_num(j["g"], "$.design.g");
    if (d.g < 0.0) fail("$.design.g", "must be nonnegative");
  } else {
    switch (doc.regime) {
      case Regime::fixed:
        d.g = gain_bound_fixed(st, sc.family[0], lambda).g;
        break;
      case Regime::dwell:
        d.g = gain_bound_dwell(st, sc.family, doc.spec.tau_D, lambda).g;
        break;
      case Regime::arbitrary:
        d.g = gain_bound_arbitrary(st, sc.family, lambda).g;
        break;
    }
  }
  if (doc.regime == Regime::fixed) d.H = perron_block_diag(st, sc.family[0]);
  sc.cdesign = std::move(d);
}

void parse_output(const json& j, ScenarioDoc& doc) {
  check_keys(j, "$.output", {}, {"trace_csv", "signal_csv", "report_json"});
  auto grab = [&](const char* key, std::string& dst) {
    if (!j.contains(key)) return;
    dst = get_str(j[key], std::string("$.output.") + key);
    if (dst.empty()) fail(std::string("$.output.") + key, "must be a nonempty path");
  };
  grab("trace_csv", doc.trace_csv);
  grab("signal_csv", doc.signal_csv);
  grab("report_json", doc.report_json);
}

void parse_expect(const json& j, ScenarioDoc& doc) {
  check_keys(j, "$.expect", {"error"}, {"message_contains"});
  const std::string name = get_str(j["error"], "$.expect.error");
  bool known = false;
  for (const char* k : kKnownErrors) known = known || name == k;
  if (!known) fail("$.expect.error", "unknown error name '" + name + "'");
  doc.expect_error = name;
  if (j.contains("message_contains"))
    doc.expect_contains = get_str(j["message_contains"], "$.expect.message_contains");
}

}  // namespace

ScenarioDoc parse_scenario_text(const std::string& text, const std::string& origin,
                                std::optional<std::uint64_t> seed_override) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(origin + ": not valid JSON (" + e.what() +
                      "); a scenario needs the blocks: schema, plant, graphs, "
                      "signal, design, sim");
  }
  check_keys(j, "$", {"schema", "plant", "graphs", "signal", "design", "sim"},
             {"output", "expect"});
  const std::string schema = get_str(j["schema"], "$.schema");
  if (schema != "splitobs-scenario/1")
    fail("$.schema", "unsupported schema '" + schema +
                         "' (expected splitobs-scenario/1)");

  ScenarioDoc doc;
  parse_plant(j["plant"], doc);
  validate_dimensions(doc.scenario.plant);
  parse_graphs(j["graphs"], doc);
  parse_sim(j["sim"], doc);
  parse_signal(j["signal"], doc, seed_override);
  parse_design(j["design"], doc);
  if (j.contains("output")) parse_output(j["output"], doc);
  if (j.contains("expect")) parse_expect(j["expect"], doc);
  validate_scenario(doc.scenario);
  return doc;
}

ScenarioDoc parse_scenario(const std::string& path,
                           std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path, seed_override);
}

std::string serialize_scenario(const ScenarioDoc& doc) {
  const Scenario& sc = doc.scenario;
  const bool discrete = sc.plant.time_kind == TimeKind::discrete;
  json j;
  j["schema"] = "splitobs-scenario/1";

  json plant;
  plant["time"] = discrete ? "discrete" : "continuous";
  plant["A"] = matrix_json(sc.plant.A);
  json cs = json::array();
  for (const auto& C : sc.plant.C) cs.push_back(matrix_json(C));
  plant["C"] = cs;
  if (discrete) plant["T"] = sc.plant.sample_period;
  j["plant"] = plant;

  json graphs = json::array();
  for (const auto& g : doc.raw_graphs) {
    json arcs = json::array();
    for (const auto& arc : g.arcs) {
      if (arc.first == arc.second) continue;
      arcs.push_back(json::array({arc.first + 1, arc.second + 1}));
    }
    graphs.push_back(json{{"arcs", arcs}});
  }
  j["graphs"] = graphs;

  json signal;
  signal["kind"] = doc.signal_kind;
  if (doc.signal_kind == "dwell" || doc.signal_kind == "avg_dwell")
    signal["tau_D"] = doc.spec.tau_D;
  if (doc.signal_kind == "avg_dwell") signal["delta0"] = doc.spec.delta0;
  if (doc.signal_kind == "arbitrary") signal["min_step"] = doc.spec.min_step;
  if (doc.signal_kind != "fixed") {
    json bps = json::array();
    for (std::size_t k = 0; k < sc.signal.breakpoints.size(); ++k)
      bps.push_back(
          json::array({sc.signal.breakpoints[k], sc.signal.values[k] + 1}));
    signal["breakpoints"] = bps;
  }
  j["signal"] = signal;

  json design;
  design["lambda"] = discrete ? sc.ddesign->rate : sc.cdesign->rate;
  design["mode"] = "use-given";
  json ks = json::array();
  for (const auto& K : doc.design_K) ks.push_back(matrix_json(K));
  design["K"] = ks;
  if (discrete) {
    design["q"] = sc.ddesign->q;
    design["q_method"] = doc.q_method;
  } else if (!sc.adaptive) {
    design["g"] = sc.cdesign->g;
    design["regime"] = doc.regime == Regime::fixed
                           ? "fixed"
                           : (doc.regime == Regime::dwell ? "dwell" : "arbitrary");
  }
  j["design"] = design;

  json sim;
  sim["x0"] = vector_json(sc.x0);
  json xi0 = json::array();
  for (const auto& v : sc.xi0) xi0.push_back(vector_json(v));
  sim["xi0"] = xi0;
  if (sc.adaptive) {
    sim["adaptive"] = true;
    sim["g0"] = vector_json(sc.g0);
  }
  sim["horizon"] = sc.horizon;
  if (!discrete) sim["h"] = sc.h;
  if (!sc.faults.empty()) {
    json faults = json::array();
    for (const auto& f : sc.faults) {
      json ev;
      ev["time"] = f.time;
      if (f.kind == FaultKind::remove_arc)
        ev["drop_arc"] = json::array({f.from + 1, f.to + 1});
      else
        ev["drop_agent"] = f.agent + 1;
      faults.push_back(ev);
    }
    sim["faults"] = faults;
  }
  j["sim"] = sim;

  json output;
  output["trace_csv"] = doc.trace_csv;
  output["signal_csv"] = doc.signal_csv;
  output["report_json"] = doc.report_json;
  j["output"] = output;

  if (doc.expect_error) {
    json expect;
    expect["error"] = *doc.expect_error;
    if (doc.expect_contains) expect["message_contains"] = *doc.expect_contains;
    j["expect"] = expect;
  }
  return j.dump(2) + "\n";
}

}  // namespace splitobs
