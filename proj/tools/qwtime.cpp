// qwtime command-line tool.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "qwtime/io.hpp"
#include "qwtime/qwtime.hpp"

using namespace qwtime;
using qwtime::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::size_t n = 1024;
  std::string out;
  std::string format;  // empty: per-command default
  double tol_scale = 1.0;
  std::optional<std::uint64_t> seed;
  std::string model;
  std::optional<double> a_abs;
  std::optional<double> alpha;
  std::optional<double> delta;
  std::optional<double> b;
  std::string state;
  std::optional<double> t;
  std::string suite;
  long t_max = 200;
  double S = 0.0;
  int order = 1;
  int band = 1;
  double weight = 0.5;
};

// ---------------------------------------------------------------------------
// Models

enum class Kind { Ctqw1d, Ctqw2d, Walk, Toy };

struct Model {
  std::string name;
  Kind kind = Kind::Ctqw1d;
  MomentumGrid grid{16};
  std::optional<DiscreteWalk> walk;
  std::vector<Band> bands;
};

Model build_model(const Options& o) {
  Model m;
  m.name = o.model;
  m.grid = MomentumGrid(o.n);
  if (o.model.empty()) throw UsageError("--model is required");
  if (o.model == "ctqw1d" || o.model == "ctqw2d") {
    m.kind = o.model == "ctqw1d" ? Kind::Ctqw1d : Kind::Ctqw2d;
    m.bands.push_back(ctqw_band(m.grid));
  } else if (o.model == "toy") {
    m.kind = Kind::Toy;
    m.bands.push_back(shift_band(m.grid));
  } else if (o.model == "hadamard") {
    m.kind = Kind::Walk;
    m.walk = coined_walk(hadamard_coin(), m.grid, "hadamard");
  } else if (o.model == "coined") {
    if (!o.a_abs) throw UsageError("--model coined needs --a-abs");
    const double alpha = o.alpha.value_or(0.0);
    const double delta = o.delta.value_or(0.0);
    const CoinParams coin = o.b ? coin_from_parameters(*o.a_abs, alpha, delta, cplx(*o.b, 0.0))
                                : coin_from_parameters(*o.a_abs, alpha, delta);
    m.kind = Kind::Walk;
    m.walk = coined_walk(coin, m.grid, "coined");
  } else if (o.model == "threestep") {
    if (!o.b) throw UsageError("--model threestep needs --b");
    m.kind = Kind::Walk;
    m.walk = threestep_walk(*o.b, m.grid);
  } else {
    throw UsageError("unknown model \"" + o.model + "\"");
  }
  if (m.walk) m.bands.assign(m.walk->bands.begin(), m.walk->bands.end());
  return m;
}

const Band& selected_band(const Model& m, const Options& o) {
  if (o.band < 1 || o.band > static_cast<int>(m.bands.size())) {
    throw UsageError("--band must be between 1 and " + std::to_string(m.bands.size()));
  }
  return m.bands[static_cast<std::size_t>(o.band - 1)];
}

// ---------------------------------------------------------------------------
// Output

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    io::atomic_write(o.out, text);
  }
}

void emit_json(const Options& o, const json& j) { emit(o, j.dump(2) + "\n"); }

json error_json(const std::string& code, const std::string& message) {
  return {{"error", code}, {"message", message}};
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::SchemaViolation:
    case ErrorCode::InvalidParameter:
    case ErrorCode::InvalidGridSize:
    case ErrorCode::InvalidWeights:
      return kExitUsage;
    default:
      return kExitNumerical;
  }
}

// ---------------------------------------------------------------------------
// Default test states

/// Bumps filling each zero-free arc of the band, inset from the zeros.
Field arc_bump(const Band& band, std::size_t arc, double inset) {
  std::vector<std::pair<double, double>> arcs;
  if (band.zeros.empty()) {
    arcs.emplace_back(0.3, kTwoPi - 0.3);
  } else {
    for (std::size_t i = 0; i < band.zeros.size(); ++i) {
      const double lo = band.zeros[i].k;
      const double hi = i + 1 < band.zeros.size() ? band.zeros[i + 1].k : band.zeros[0].k + kTwoPi;
      arcs.emplace_back(lo + inset, hi - inset);
    }
  }
  const auto& [lo, hi] = arcs[arc % arcs.size()];
  return normalized(smooth_bump(band.grid, lo, hi));
}

std::size_t arc_count(const Band& band) { return std::max<std::size_t>(1, band.zeros.size()); }

std::vector<Field> test_functions(const Band& band, const Options& o, double inset) {
  std::vector<Field> out;
  for (std::size_t a = 0; a < arc_count(band); ++a) out.push_back(arc_bump(band, a, inset));
  Field modulated = out.front();
  for (std::size_t j = 0; j < modulated.size(); ++j) modulated[j] *= std::polar(1.0, 2.0 * band.grid.k(j));
  out.push_back(modulated);
  if (o.seed) {
    std::mt19937_64 rng(*o.seed);
    std::normal_distribution<double> nd;
    Field mix(band.grid, Representation::Momentum);
    for (std::size_t a = 0; a < arc_count(band); ++a) mix += cplx(nd(rng), nd(rng)) * arc_bump(band, a, inset);
    out.push_back(normalized(mix));
  }
  return out;
}

Field band_state(const Model& m, const Options& o, const Band& band) {
  if (o.state.empty()) return arc_bump(band, 0, 0.2);
  const json j = io::parse_json_text(io::read_file(o.state));
  if (io::state_kind(j) == io::StateKind::Spinor) {
    if (!m.walk) throw UsageError("spinor state given for a single-band model");
    const auto comps = band_components(m.walk->frame, to_momentum(io::spinor_from_json(j)));
    return comps[static_cast<std::size_t>(o.band - 1)];
  }
  Field f = io::field_from_json(j);
  if (!(f.grid() == band.grid)) throw UsageError("state grid does not match --n");
  return to_momentum(f);
}

// ---------------------------------------------------------------------------
// Commands

json zeros_json(const Model& m) {
  json z = json::array();
  for (const auto& b : m.bands) z.push_back(io::zeros_to_json(b));
  return z;
}

json winding_json(const Model& m) {
  json w = json::array();
  for (const auto& b : m.bands) w.push_back(b.winding);
  return w;
}

int cmd_dispersion(const Options& o) {
  const Model m = build_model(o);
  json summary = {{"model", m.name}, {"n", o.n}, {"winding", winding_json(m)}, {"zeros", zeros_json(m)}};
  json bands = json::array();
  for (const auto& b : m.bands) bands.push_back(io::band_summary(b));
  summary["bands"] = bands;
  if (m.kind == Kind::Ctqw2d) summary["note"] = "per-axis factor cos k of H_2 = (cos k1 + cos k2) / 2";
  const std::string format = o.format.empty() ? (o.out.empty() ? "json" : "csv") : o.format;
  if (format == "csv") {
    std::string csv;
    for (const auto& b : m.bands) csv += io::band_csv(b);
    emit(o, csv);
    if (!o.out.empty()) std::cout << summary.dump(2) << "\n";
  } else {
    emit_json(o, summary);
  }
  return kExitOk;
}

int cmd_winding(const Options& o) {
  const Model m = build_model(o);
  json j = {{"model", m.name}, {"n", o.n}, {"winding", winding_json(m)}};
  json sums = json::array();
  for (const auto& b : m.bands) sums.push_back(winding_sum(b.lambda));
  j["phase_increment_over_2pi"] = sums;
  emit_json(o, j);
  return kExitOk;
}

int cmd_classify(const Options& o) {
  const Model m = build_model(o);
  json j;
  if (m.walk) {
    j = io::classification_report(m.walk->bands, classify(m.walk->bands));
  } else {
    j = io::classification_report(m.bands[0], classify(m.bands[0]));
  }
  if (m.kind == Kind::Ctqw2d) {
    j["deficiency"] = {"infinite", "infinite"};
    j["note"] = "tensor operator T_2 has infinite-dimensional deficiency spaces spanned by product vectors";
  }
  j["model"] = m.name;
  emit_json(o, j);
  return kExitOk;
}

json footer(double before, double after, const Options& o) {
  return {{"model", o.model}, {"t", *o.t}, {"norm_in", before}, {"norm_out", after},
          {"norm_drift", std::abs(after - before)}};
}

int cmd_evolve(const Options& o) {
  if (o.state.empty()) throw UsageError("evolve needs --state");
  if (!o.t) throw UsageError("evolve needs --t");
  const Model m = build_model(o);
  const json in = io::parse_json_text(io::read_file(o.state));
  const auto kind = io::state_kind(in);
  const double t = *o.t;
  const bool discrete = m.kind == Kind::Walk || m.kind == Kind::Toy;
  if (discrete && (t != std::round(t) || t < 0)) throw UsageError("--t must be a non-negative integer for discrete models");
  const long steps = static_cast<long>(t);
  json result;
  double before = 0.0, after = 0.0;
  if (m.kind == Kind::Walk) {
    if (kind != io::StateKind::Spinor) throw Error(ErrorCode::SchemaViolation, "walk models need a spinor state");
    const SpinorField psi = io::spinor_from_json(in);
    if (!(psi.grid() == m.grid)) throw UsageError("state grid does not match --n");
    before = norm(psi);
    SpinorField out = psi;
    if (steps > 0) {
      out = psi.rep() == Representation::Position ? evolve_position(*m.walk, psi, steps)
                                                   : evolve_momentum(*m.walk, psi, steps);
    }
    after = norm(out);
    result = io::to_json(out);
  } else if (m.kind == Kind::Ctqw2d) {
    if (kind != io::StateKind::Torus) throw Error(ErrorCode::SchemaViolation, "ctqw2d needs a torus state");
    const TorusField psi = io::torus_from_json(in);
    if (!(psi.grid() == m.grid)) throw UsageError("state grid does not match --n");
    before = norm(psi);
    const TorusField out = t == 0.0 ? psi : ctqw_evolve(psi, t);
    after = norm(out);
    result = io::to_json(out);
  } else {
    if (kind != io::StateKind::Scalar) throw Error(ErrorCode::SchemaViolation, "expected a scalar state");
    const Field psi = io::field_from_json(in);
    if (!(psi.grid() == m.grid)) throw UsageError("state grid does not match --n");
    before = norm(psi);
    Field out = psi;
    if (m.kind == Kind::Ctqw1d) {
      if (t != 0.0) out = ctqw_evolve(psi, t);
    } else if (steps > 0) {
      if (psi.rep() == Representation::Position) {
        require_support_margin(out);
        for (long s = 0; s < steps; ++s) out = shift_L(out);
        require_support_margin(out);
      } else {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] *= std::polar(1.0, static_cast<double>(steps) * m.grid.k(j));
      }
    }
    after = norm(out);
    result = io::to_json(out);
  }
  result["footer"] = footer(before, after, o);
  emit_json(o, result);
  return kExitOk;
}

int cmd_timeop(const Options& o) {
  const Model m = build_model(o);
  json result;
  if (m.kind == Kind::Ctqw2d) {
    if (o.state.empty()) throw UsageError("timeop on ctqw2d needs --state");
    const TorusField psi = to_momentum(io::torus_from_json(io::parse_json_text(io::read_file(o.state))));
    const TorusField tpsi = tensor_time_apply(psi, o.weight, 1.0 - o.weight);
    result = io::to_json(tpsi);
    result["footer"] = {{"model", m.name}, {"weights", {o.weight, 1.0 - o.weight}}, {"mean", io::values_to_json(std::vector<cplx>{inner(psi, tpsi)})[0]}};
  } else if (m.walk && !o.state.empty() &&
             io::state_kind(io::parse_json_text(io::read_file(o.state))) == io::StateKind::Spinor) {
    const SpinorField psi = to_momentum(io::spinor_from_json(io::parse_json_text(io::read_file(o.state))));
    const SpinorField tpsi = apply_T_full(psi, *m.walk);
    result = io::to_json(tpsi);
    result["footer"] = {{"model", m.name}, {"mean", io::values_to_json(std::vector<cplx>{inner(psi, tpsi)})[0]}};
  } else {
    const Band& band = selected_band(m, o);
    const Field psi = band_state(m, o, band);
    const Field tpsi = apply_T_band(psi, band);
    result = io::to_json(tpsi);
    json f = {{"model", m.name}, {"band", o.band}, {"mean", io::values_to_json(std::vector<cplx>{inner(psi, tpsi)})[0]}};
    if (std::abs(norm(psi) - 1.0) <= kNormalizationTolerance) f["uncertainty"] = uncertainty(psi, band);
    result["footer"] = f;
  }
  emit_json(o, result);
  return kExitOk;
}

int cmd_decay(const Options& o) {
  const Model m = build_model(o);
  if (m.kind == Kind::Ctqw2d) throw UsageError("decay runs on one-dimensional branches");
  const Band& band = selected_band(m, o);
  const Field psi = normalized(band_state(m, o, band));
  const auto rs = survival_bound_check(psi, band, o.t_max);
  const bool ok = all_satisfied(rs);
  if (o.format != "json") {
    emit(o, io::decay_csv(rs));
  } else {
    json j = {{"model", m.name},
              {"band", o.band},
              {"t_max", o.t_max},
              {"uncertainty", uncertainty(psi, band)},
              {"all_satisfied", ok}};
    const auto tr = transition_bound_check(psi, psi, band, o.S, o.t_max);
    j["transition_all_satisfied"] = all_satisfied(tr);
    if (o.order > 1) {
      const HigherOrderResult h = higher_order_check(psi, psi, band, o.order, o.t_max);
      j["higher_order"] = {{"order", h.order}, {"sup_full", h.sup_full}, {"sup_half", h.sup_half},
                           {"tail_sup", h.tail_sup}, {"stable", h.stable}};
    }
    emit_json(o, j);
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_energy_rep(const Options& o) {
  const Model m = build_model(o);
  if (m.kind == Kind::Ctqw2d) throw UsageError("energy-rep runs on one-dimensional branches");
  const Band& band = selected_band(m, o);
  const Field f = band_state(m, o, band);
  const auto brs = energy_branches(band);
  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "branch,E,k,re_vf,im_vf\n";
    for (std::size_t b = 0; b < brs.size(); ++b) {
      const CVec v = energy_transform(f, brs[b]);
      for (std::size_t i = 0; i < v.size(); ++i)
        csv << b << ',' << io::fmt(brs[b].E[i]) << ',' << io::fmt(brs[b].k[i]) << ',' << io::fmt(v[i].real()) << ','
            << io::fmt(v[i].imag()) << "\n";
    }
    emit(o, csv.str());
    return kExitOk;
  }
  json branches = json::array();
  for (const auto& br : brs) {
    branches.push_back({{"k_lo", br.k_lo}, {"k_hi", br.k_hi}, {"sign", br.sign}, {"e_min", br.e_min},
                        {"e_max", br.e_max}, {"samples", br.E.size()}});
  }
  emit_json(o, {{"model", m.name},
                {"band", o.band},
                {"branches", branches},
                {"unitarity_defect", energy_unitarity_defect(f, band, brs)},
                {"intertwining_defect", energy_intertwining_defect(f, band, brs)}});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Check suites

struct Report {
  std::string suite;
  json cases = json::array();
  bool all_pass = true;
  double scale = 1.0;

  void add(const std::string& name, double residual, double tolerance) {
    const double tol = tolerance * scale;
    const bool pass = std::isfinite(residual) && residual < tol;
    cases.push_back({{"name", name}, {"residual", residual}, {"tolerance", tol}, {"pass", pass}});
    all_pass = all_pass && pass;
  }
  void add_flag(const std::string& name, bool pass) {
    cases.push_back({{"name", name}, {"residual", pass ? 0.0 : 1.0}, {"tolerance", 0.5}, {"pass", pass}});
    all_pass = all_pass && pass;
  }
};

void suite_commutation(const Model& m, const Options& o, Report& r) {
  if (m.kind == Kind::Ctqw2d) {
    const TorusField psi = TorusField::sample(m.grid, [](double a, double c) {
      return bump_value(a, 0.4, 2.7) * bump_value(c, 3.5, 5.9);
    });
    for (double t : {0.5, 1.0, 2.0})
      r.add("tensor t=" + io::fmt(t), tensor_commutation_residual(psi, o.weight, 1.0 - o.weight, t), 1e-6);
    return;
  }
  for (std::size_t bi = 0; bi < m.bands.size(); ++bi) {
    const Band& b = m.bands[bi];
    if (b.constant) {
      r.add_flag(b.label + " constant branch has no strong time operator", false);
      continue;
    }
    const auto fs = test_functions(b, o, 0.1);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string name = b.label + " f" + std::to_string(i);
      if (b.dynamics == Dynamics::Hamiltonian) {
        for (double t : {0.5, 1.0, 2.0}) r.add(name + " t=" + io::fmt(t), commutation_residual_sa(fs[i], b, t), 1e-8);
      } else {
        r.add(name, commutation_residual_unitary(fs[i], b), 1e-8);
      }
    }
  }
  if (m.walk && !m.bands[0].constant && !m.bands[1].constant) {
    const SpinorField psi = normalized(from_band_components(m.walk->frame, arc_bump(m.bands[0], 0, 0.1),
                                                            arc_bump(m.bands[1], 0, 0.1)));
    r.add("walk spinor", commutation_residual_unitary(psi, *m.walk), 1e-8);
  }
}

void suite_energy(const Model& m, const Options& o, Report& r) {
  if (m.kind == Kind::Ctqw2d) throw UsageError("energy-rep suite runs on one-dimensional branches");
  for (const auto& b : m.bands) {
    const auto brs = energy_branches(b);
    const auto fs = test_functions(b, o, 0.15);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string name = b.label + " f" + std::to_string(i);
      r.add(name + " unitarity", energy_unitarity_defect(fs[i], b, brs), 1e-6);
      r.add(name + " intertwining", energy_intertwining_defect(fs[i], b, brs), 1e-4);
    }
  }
}

void suite_deficiency(const Model& m, const Options& o, Report& r) {
  if (m.kind == Kind::Ctqw2d) {
    for (double eps : {0.1, 0.25}) {
      for (int sign : {+1, -1}) {
        r.add("tensor eps=" + io::fmt(eps) + (sign > 0 ? " +" : " -"),
              tensor_deficiency_residual(m.grid, eps, o.weight, 1.0 - o.weight, sign), 1e-6);
      }
    }
    return;
  }
  for (const auto& b : m.bands) {
    if (b.zeros.empty()) {
      r.add_flag(b.label + " no zeros of g': deficiency indices (0,0)", true);
      continue;
    }
    const double tol = b.dynamics == Dynamics::Hamiltonian ? 1e-8 : 1e-6;
    const auto brs = energy_branches(b, 5);
    for (std::size_t i = 0; i < brs.size(); ++i) {
      for (int sign : {+1, -1}) {
        r.add(b.label + " branch" + std::to_string(i) + (sign > 0 ? " +i" : " -i"),
              deficiency_vector_residual(b, brs[i], sign), tol);
      }
    }
  }
  if (m.kind == Kind::Ctqw1d) {
    for (double eps : {0.1, 0.25, 1.0}) {
      r.add("family eps=" + io::fmt(eps),
            eigenfunction_residual(m.bands[0], continuous_deficiency_family(eps), cplx(0.0, eps), 0.1, kPi - 0.1), 1e-8);
    }
  }
}

void suite_decay(const Model& m, const Options& o, Report& r) {
  if (m.kind == Kind::Ctqw2d) throw UsageError("decay suite runs on one-dimensional branches");
  for (const auto& b : m.bands) {
    const auto fs = test_functions(b, o, 0.2);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const Field psi = normalized(fs[i]);
      const auto rs = survival_bound_check(psi, b, o.t_max);
      double worst = 0.0;
      for (const auto& rec : rs) worst = std::max(worst, std::norm(rec.amplitude) - rec.bound);
      r.add(b.label + " f" + std::to_string(i) + " survival excess", worst, kBoundSlack);
    }
    const HigherOrderResult h = higher_order_check(normalized(fs[0]), normalized(fs[0]), b, 2, o.t_max);
    r.add(b.label + " second-order growth ratio", h.sup_half > 0.0 ? h.sup_full / h.sup_half : 1.0,
          kHigherOrderStability + 1e-15);
  }
}

void suite_spectrum(const Model& m, const Options&, Report& r) {
  if (m.kind == Kind::Ctqw2d || m.kind == Kind::Ctqw1d) {
    throw Error(ErrorCode::NotSelfAdjointCase, "continuous-time models have no self-adjoint truncated spectrum check");
  }
  const Band& b = m.bands[0];
  const int cutoff = static_cast<int>(std::min<std::size_t>(64, m.grid.size() / 8));
  const SpectrumStudy st = self_adjoint_spectrum_check(b, cutoff);
  double worst = 0.0;
  for (std::size_t i = 0; i < st.coarse_distance.size(); ++i)
    if (st.coarse_distance[i] <= 0.05) worst = std::max(worst, st.coarse_distance[i]);
  const double expected = 20.0 * std::abs(b.winding) + 1.0;
  r.add("lattice points in [-10,10] without a near eigenvalue",
        std::max(0.0, expected - static_cast<double>(st.within_tolerance)), 0.5);
  r.add("max lattice distance", worst, 0.05);
  r.add_flag("distances do not grow at 2M", st.converged);
  r.cases.back()["cutoffs"] = {st.coarse.cutoff, st.fine.cutoff};
  json ev = json::array();
  for (double e : st.window_eigenvalues) ev.push_back(e);
  r.cases.back()["eigenvalues"] = ev;
}

void suite_two_eigenvalue(const Options& o, Report& r) {
  std::vector<std::pair<cplx, cplx>> pairs;
  if (o.seed) {
    std::mt19937_64 rng(*o.seed);
    std::uniform_real_distribution<double> ud(0.0, kTwoPi);
    while (pairs.size() < 20) {
      const cplx l = std::polar(1.0, ud(rng));
      const cplx mu = std::polar(1.0, ud(rng));
      if (std::abs(l - mu) >= 0.1) pairs.emplace_back(l, mu);
    }
  } else {
    for (int j = 0; j < 20; ++j) pairs.emplace_back(std::polar(1.0, kTwoPi * j / 20.0), std::polar(1.0, kTwoPi * j / 20.0 + 0.3 + 0.25 * j));
  }
  pairs.emplace_back(std::polar(1.0, kPi / 2), std::polar(1.0, -kPi / 2));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto op = two_eigenvalue_time_operator(pairs[i].first, pairs[i].second);
    const std::string name = i + 1 == pairs.size() ? "a=0 coin pair" : "pair " + std::to_string(i);
    r.add(name + " commutator", op.commutator_residual, 1e-14);
    r.add(name + " hermiticity", op.hermiticity_defect, 1e-14);
  }
}

int cmd_check(const Options& o) {
  static const std::vector<std::string> suites = {"commutation", "energy-rep", "deficiency-vectors",
                                                  "decay", "spectrum", "two-eigenvalue"};
  if (std::find(suites.begin(), suites.end(), o.suite) == suites.end()) {
    throw UsageError("unknown suite \"" + o.suite + "\"");
  }
  Report r;
  r.suite = o.suite;
  r.scale = o.tol_scale;
  if (o.suite == "two-eigenvalue") {
    suite_two_eigenvalue(o, r);
  } else {
    const Model m = build_model(o);
    if (o.suite == "commutation") suite_commutation(m, o, r);
    if (o.suite == "energy-rep") suite_energy(m, o, r);
    if (o.suite == "deficiency-vectors") suite_deficiency(m, o, r);
    if (o.suite == "decay") suite_decay(m, o, r);
    if (o.suite == "spectrum") suite_spectrum(m, o, r);
  }
  emit_json(o, {{"suite", r.suite}, {"cases", r.cases}, {"all_pass", r.all_pass}});
  return r.all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time operators of quantum walks"};
  app.require_subcommand(1);
  Options o;

  app.add_option("--n", o.n, "Grid size (even, >= 16)");
  app.add_option("--out", o.out, "Write output to this file (atomic)");
  app.add_option("--format", o.format, "Output format (decay defaults to csv, others to json)")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tol-scale", o.tol_scale, "Multiply check tolerances")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Seed for randomized test functions");
  app.add_option("--model", o.model, "ctqw1d | ctqw2d | coined | hadamard | threestep | toy");
  app.add_option("--a-abs", o.a_abs, "Coin |a|");
  app.add_option("--alpha", o.alpha, "Coin arg(a)");
  app.add_option("--delta", o.delta, "Coin arg(det C)");
  app.add_option("--b", o.b, "Three-step b, or real coin entry b");
  app.add_option("--state", o.state, "State JSON file");
  app.add_option("--t", o.t, "Evolution time");
  app.add_option("--band", o.band, "Branch index (1 or 2)");
  app.add_option("--weight", o.weight, "First tensor weight alpha_1 (alpha_2 = 1 - alpha_1)");

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Sub subs[] = {
      {"dispersion", "Band CSV and winding/zeros summary", cmd_dispersion},
      {"winding", "Winding numbers of the branches", cmd_winding},
      {"classify", "Deficiency indices and spectrum of the time operator", cmd_classify},
      {"evolve", "Evolve a state file", cmd_evolve},
      {"timeop", "Apply the time operator to a state", cmd_timeop},
      {"decay", "Survival amplitudes against the uncertainty bound", cmd_decay},
      {"energy-rep", "Energy representation of a branch", cmd_energy_rep},
      {"check", "Run a verification suite", cmd_check},
  };
  int (*selected)(const Options&) = nullptr;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->fallthrough();
    sub->callback([&selected, &s] { selected = s.run; });
    if (std::string(s.name) == "check") {
      sub->add_option("--suite", o.suite, "commutation | energy-rep | deficiency-vectors | decay | spectrum | two-eigenvalue")
          ->required();
    }
    if (std::string(s.name) == "decay") {
      sub->add_option("--t-max", o.t_max, "Last time step")->check(CLI::PositiveNumber);
      sub->add_option("--S", o.S, "Real scalar in the transition bound");
      sub->add_option("--order", o.order, "Order of the higher-order check")->check(CLI::Range(1, 3));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json("Usage", e.what()).dump() << "\n";
    return kExitUsage;
  }

  try {
    return selected(o);
  } catch (const UsageError& e) {
    std::cerr << error_json("Usage", e.what()).dump() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << error_json(std::string(to_string(e.code())), e.what()).dump() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << error_json("Internal", e.what()).dump() << "\n";
    return kExitNumerical;
  }
}
