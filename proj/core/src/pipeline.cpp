#include "optlim/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace optlim {

const std::map<std::string, std::string>& bundled_fixtures() {
  // Rolfsen-table PD codes, oriented with consecutive arc numbering.
  static const std::map<std::string, std::string> k = {
      {"3_1", "knot 3_1\nX(1,4,2,5) X(3,6,4,1) X(5,2,6,3)\n"},
      {"4_1", "knot 4_1\nX(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)\n"},
      {"5_2", "knot 5_2\nX(1,4,2,5) X(3,8,4,9) X(5,10,6,1) X(9,6,10,7) X(7,2,8,3)\n"},
      {"6_1",
       "knot 6_1\nX(1,4,2,5) X(7,10,8,11) X(3,9,4,8) X(9,3,10,2) X(5,12,6,1) "
       "X(11,6,12,7)\n"},
      {"6_2",
       "knot 6_2\nX(1,4,2,5) X(5,10,6,11) X(3,9,4,8) X(9,3,10,2) X(7,12,8,1) "
       "X(11,6,12,7)\n"},
      {"6_3",
       "knot 6_3\nX(4,2,5,1) X(8,4,9,3) X(12,9,1,10) X(10,5,11,6) "
       "X(6,11,7,12) X(2,8,3,7)\n"},
  };
  return k;
}

PipelineObjects build_objects(const ComputeOptions& opts) {
  PipelineObjects po;
  std::string text = opts.pd_text;
  if (text.empty()) {
    auto it = bundled_fixtures().find(opts.knot);
    if (it == bundled_fixtures().end())
      throw ParseError("unknown fixture knot '" + opts.knot + "'");
    text = it->second;
  }
  po.diagram = parse_pd(text);
  if (opts.open_side) {
    po.tangle = open_tangle(po.diagram, *opts.open_side);
    auto rep = check_assumptions(po.tangle);
    if (!rep.empty()) throw AssumptionViolation(rep.front());
  } else {
    po.tangle = auto_open(po.diagram);
  }
  po.vars = assign_variables(po.tangle, opts.unit_region);
  po.V = build_V(po.tangle, po.vars);
  po.W = build_W(po.tangle, po.vars);
  po.yokota = build_yokota(po.tangle, po.vars);
  po.thurston = build_thurston(po.tangle, po.vars);
  return po;
}

ComputeReport run_compute(const ComputeOptions& opts) {
  ComputeReport r;
  r.rng_seed = opts.rng_seed;
  r.seeds = opts.seeds;
  r.with_timings = opts.with_timings;
  auto t0 = std::chrono::steady_clock::now();
  auto done = [&]() {
    r.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    return r;
  };

  PipelineObjects po;
  try {
    po = build_objects(opts);
  } catch (const ParseError& e) {
    r.status = ComputeStatus::ParseFailure;
    r.error = e.what();
    return done();
  } catch (const ValidationError& e) {
    r.status = ComputeStatus::ParseFailure;
    r.error = e.what();
    return done();
  } catch (const AssumptionViolation& e) {
    r.status = ComputeStatus::AssumptionFailure;
    r.error = e.what();
    return done();
  } catch (const EndpointClash& e) {
    r.status = ComputeStatus::AssumptionFailure;
    r.error = e.what();
    return done();
  }
  r.knot = po.diagram.name.empty() ? opts.knot : po.diagram.name;
  r.crossings = po.diagram.n();
  r.open_side = po.tangle.cut_arc;
  r.unit_region = po.vars.unit_region;
  r.g = po.vars.g;
  r.m = po.vars.m;

  SolveOptions so;
  so.seeds = opts.seeds;
  so.rng_seed = opts.rng_seed;
  so.tol = opts.tol;
  so.threads = opts.threads;

  SolutionSet h1, h2;
  try {
    h2 = solve(system_from_potential(po.W), so);
    h1 = solve(system_from_potential(po.V), so);
  } catch (const NoConvergence& e) {
    r.status = ComputeStatus::NoEssentialSolution;
    r.error = e.what();
    return done();
  }
  classify(h2, po.thurston);
  classify(h1, po.yokota);

  // cross-seed the two systems through the 4-5 / 3-2 correspondence so a
  // solution found on one side is never missing from the other
  auto sysW = system_from_potential(po.W);
  auto sysV = system_from_potential(po.V);
  bool grew = false;
  for (const auto& s : h1.solutions) {
    if (!s.essential) continue;
    try {
      grew |= merge_candidate(
          h2, sysW,
          convert_z_to_w(s.values, po.tangle, po.vars, po.yokota, po.thurston,
                         opts.tol),
          opts.tol);
    } catch (const NonEssentialImage&) {
    }
  }
  for (const auto& s : h2.solutions) {
    if (s.shapes.empty() || !s.essential) continue;
    try {
      grew |= merge_candidate(
          h1, sysV,
          convert_w_to_z(s.values, po.tangle, po.vars, po.yokota, po.thurston,
                         opts.tol),
          opts.tol);
    } catch (const NonEssentialImage&) {
    }
  }
  if (grew) {
    classify(h2, po.thurston);
    classify(h1, po.yokota);
  }

  auto fill = [](const SolutionSet& ss, const PotentialFunction& p,
                 std::vector<SolutionReport>& out) {
    for (const auto& s : ss.solutions) {
      SolutionReport sr;
      sr.values = s.values;
      sr.residual = s.residual;
      sr.essential = s.essential;
      sr.volume = s.volume;
      sr.geometric = s.geometric;
      try {
        sr.flattened = p.flattened(s.values);
      } catch (const NotASolution&) {
      }
      out.push_back(std::move(sr));
    }
  };
  fill(h2, po.W, r.h2_solutions);
  fill(h1, po.V, r.h1_solutions);
  r.geometric_index = h2.geometric_index;
  if (h2.geometric_index < 0) {
    r.status = ComputeStatus::NoEssentialSolution;
    r.error = "no essential solution of the region system";
    return done();
  }

  const auto& w0 = h2.solutions[static_cast<size_t>(h2.geometric_index)];
  try {
    r.w0_flattened = po.W.flattened(w0.values);
  } catch (const NotASolution& e) {
    r.status = ComputeStatus::ConsistencyFailure;
    r.error = e.what();
    return done();
  }
  r.vol = r.w0_flattened.imag();
  double cs = -r.w0_flattened.real();
  cs -= kPi2 * std::round(cs / kPi2);
  if (cs <= -kPi2 / 2) cs += kPi2;
  if (cs > kPi2 / 2) cs -= kPi2;
  r.cs = cs;

  // structural checks at the geometric solution
  try {
    for (const auto& er : verify_edge_relations(po.thurston, w0.values)) {
      if (er.tag == 'A')
        r.edge_residual_A = std::max(r.edge_residual_A, er.residual);
      else
        r.edge_residual_BC = std::max(r.edge_residual_BC, er.residual);
    }
    r.cusp_residual = verify_cusp(po.thurston, w0.values);
  } catch (const NonEssentialPoint& e) {
    r.status = ComputeStatus::ConsistencyFailure;
    r.error = e.what();
    return done();
  }

  // V0/W0 congruence and remaining-term cancellation across the essential
  // pairs
  double worst13 = 0, worst_cancel = 0, worst_rt = 0;
  for (const auto& s : h1.solutions) {
    if (!s.essential) continue;
    std::vector<Cx> wz;
    try {
      wz = convert_z_to_w(s.values, po.tangle, po.vars, po.yokota, po.thurston,
                          opts.tol);
    } catch (const NonEssentialImage&) {
      continue;
    }
    if (!po.thurston.essential(wz)) continue;
    try {
      Cx v0 = po.V.flattened(s.values);
      Cx w0f = po.W.flattened(wz);
      Cx dd = v0 - w0f;
      worst13 = std::max(worst13, std::abs(dd.imag()));
      double k = std::round(dd.real() / (4 * kPi2));
      worst13 = std::max(worst13, std::abs(dd.real() - 4 * kPi2 * k));
      worst_cancel = std::max(
          worst_cancel, check_cancellation(po.tangle, po.vars, s.values, wz));
      auto zrt = convert_w_to_z(wz, po.tangle, po.vars, po.yokota, po.thurston,
                                opts.tol);
      for (size_t i = 0; i < zrt.size(); ++i)
        worst_rt = std::max(worst_rt, std::abs(zrt[i] - s.values[i]));
    } catch (const NotASolution& e) {
      r.status = ComputeStatus::ConsistencyFailure;
      r.error = e.what();
      return done();
    } catch (const NonEssentialImage&) {
      continue;
    }
  }
  r.flattened_congruence_residual = worst13;
  r.cancellation_residual = worst_cancel;
  r.roundtrip_residual = worst_rt;
  if (worst13 > 1e-8) {
    r.status = ComputeStatus::ConsistencyFailure;
    r.error = "V0/W0 mod 4pi^2 agreement exceeded tolerance";
  }
  return done();
}

// ----------------------------------------------------------------- report

namespace {

nlohmann::json cx_json(Cx v) { return {v.real(), v.imag()}; }

std::string dump_stable(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string ComputeReport::to_json() const {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["tool_version"] = kVersion;
  j["status"] = static_cast<int>(status);
  if (!error.empty()) j["error"] = error;
  j["knot"] = knot;
  j["crossings"] = crossings;
  j["open_side"] = open_side;
  j["unit_region"] = unit_region;
  j["g"] = g;
  j["m"] = m;
  j["rng_seed"] = rng_seed;
  j["seeds"] = seeds;
  auto sols = [&](const std::vector<SolutionReport>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& s : v) {
      nlohmann::json js;
      nlohmann::json vals = nlohmann::json::array();
      for (Cx x : s.values) vals.push_back(cx_json(x));
      js["values"] = vals;
      js["residual"] = s.residual;
      js["essential"] = s.essential;
      js["volume"] = s.volume;
      js["geometric"] = s.geometric;
      if (s.flattened) js["flattened"] = cx_json(*s.flattened);
      a.push_back(js);
    }
    return a;
  };
  j["h2_solutions"] = sols(h2_solutions);
  j["h1_solutions"] = sols(h1_solutions);
  j["geometric_index"] = geometric_index;
  if (status == ComputeStatus::Ok || status == ComputeStatus::ConsistencyFailure) {
    j["W0"] = cx_json(w0_flattened);
    j["vol"] = vol;
    j["cs"] = cs;
    j["checks"] = {{"edge_residual_A", edge_residual_A},
                   {"edge_residual_BC", edge_residual_BC},
                   {"cusp_residual", cusp_residual},
                   {"flattened_congruence_residual", flattened_congruence_residual},
                   {"cancellation_residual", cancellation_residual},
                   {"roundtrip_residual", roundtrip_residual}};
  }
  if (with_timings) j["timing_ms"] = elapsed_ms;
  return dump_stable(j);
}

std::string SuiteResult::to_json() const {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["suite"] = suite;
  j["pass"] = pass;
  j["samples"] = samples;
  j["max_residual"] = max_residual;
  j["tolerance"] = tolerance;
  j["lines"] = lines;
  return dump_stable(j);
}

// ----------------------------------------------------------------- suites

namespace {

struct SampleMax {
  double worst = 0.0;
  long at = -1;  // rng stream index of the worst sample, for reproduction
};

template <typename Fn>
SampleMax parallel_max(long samples, int threads, std::uint64_t seed, Fn&& fn) {
  threads = std::max(1, threads);
  std::vector<SampleMax> worst(static_cast<size_t>(threads));
  auto run = [&](int t) {
    SampleMax w;
    for (long i = t; i < samples; i += threads) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
      double r = fn(rng);
      if (r > w.worst) {
        w.worst = r;
        w.at = i;
      }
    }
    worst[static_cast<size_t>(t)] = w;
  };
  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(run, t);
    for (auto& th : pool) th.join();
  }
  SampleMax out;
  for (const auto& w : worst)
    if (w.worst > out.worst) out = w;
  return out;
}

std::string fmt_max(const SampleMax& m) {
  return std::to_string(m.worst) +
         (m.at >= 0 ? " (worst at sample " + std::to_string(m.at) + ")" : "");
}

SuiteResult suite_lemma5(const SuiteOptions& o) {
  SuiteResult r;
  r.suite = "lemma5";
  r.tolerance = 1e-9;
  // calibration points
  OctahedronSample cal;
  cal.t = {Cx(0, 1), Cx(0, 1), Cx(0, 1), Cx(0, 1)};
  cal.u = {Cx(0, 1), Cx(0, 1), Cx(0, 1), Cx(0, 1), Cx(-1, 0)};
  double calres = 0;
  for (int w = 22; w <= 25; ++w) calres = std::max(calres, check_lemma5(cal, w));
  CollapsedSample cc;
  cc.t = {std::polar(1.0, 2 * kPi / 3), std::polar(1.0, 2 * kPi / 3),
          std::polar(1.0, 2 * kPi / 3)};
  cc.u = move_32(cc.t);
  for (int w = 26; w <= 29; ++w)
    calres = std::max(calres, check_lemma5_collapsed(cc, w));
  r.lines.push_back("calibration points (all-i, all-exp(2pi i/3)): " +
                    std::to_string(calres));
  if (calres > 1e-12) {
    r.pass = false;
    r.max_residual = calres;
    return r;
  }
  auto w1 = parallel_max(o.samples, o.threads, o.rng_seed, [](Rng& rng) {
    OctahedronSample s = sample_octahedron(rng);
    double w = 0;
    for (int k = 22; k <= 25; ++k) w = std::max(w, check_lemma5(s, k));
    return w;
  });
  r.lines.push_back("full-octahedron identities on " + std::to_string(o.samples) +
                    " octahedra: max " + fmt_max(w1));
  auto w2 = parallel_max(o.samples, o.threads, o.rng_seed ^ 0xc011ull,
                         [](Rng& rng) {
                           CollapsedSample s = sample_collapsed(rng);
                           double w = 0;
                           for (int k = 26; k <= 29; ++k)
                             w = std::max(w, check_lemma5_collapsed(s, k));
                           return w;
                         });
  r.lines.push_back("collapsed identities on " + std::to_string(o.samples) +
                    " triples: max " + fmt_max(w2));
  // unrestricted chambers: mod 4pi^2 with exact imaginary part
  auto w3 = parallel_max(std::max(1L, static_cast<long>(o.samples) / 10),
                         o.threads, o.rng_seed ^ 0xfeedull, [](Rng& rng) {
                           OctahedronSample s =
                               sample_octahedron_any_chamber(rng);
                           double w = 0;
                           for (int k = 22; k <= 25; ++k) {
                             Cx d = lemma5_delta(s, k);
                             double kk = std::round(d.real() / (4 * kPi2));
                             w = std::max(
                                 w, std::abs(d - Cx(4 * kPi2 * kk, 0)));
                           }
                           return w;
                         });
  r.lines.push_back("full identities mod 4pi^2, unrestricted chambers: max " +
                    fmt_max(w3));
  r.samples = o.samples * 8;
  r.max_residual = std::max({w1.worst, w2.worst, w3.worst});
  r.pass = r.max_residual <= r.tolerance;
  return r;
}

SuiteResult suite_lemma31(const SuiteOptions& o) {
  SuiteResult r;
  r.suite = "lemma31";
  r.tolerance = 1e-10;
  auto wd = parallel_max(o.samples, o.threads, o.rng_seed, [](Rng& rng) {
    auto w = sample_crossing_regions(rng);
    return check_lemma31_derivatives(w);
  });
  auto wf = parallel_max(o.samples, o.threads, o.rng_seed ^ 0xf1a7ull,
                         [](Rng& rng) {
                           auto w = sample_crossing_regions(rng);
                           return check_lemma31_flattened(w);
                         });
  r.lines.push_back("derivative agreement: max " + fmt_max(wd));
  r.lines.push_back("flattened mod 4pi^2 agreement: max " + fmt_max(wf));
  r.samples = 2L * o.samples;
  r.max_residual = std::max(wd.worst, wf.worst);
  r.pass = wd.worst <= 1e-12 && wf.worst <= 1e-10;
  return r;
}

SuiteResult suite_moves(const SuiteOptions& o) {
  SuiteResult r;
  r.suite = "moves";
  r.tolerance = 1e-12;
  auto w1 = parallel_max(o.samples, o.threads, o.rng_seed, [](Rng& rng) {
    OctahedronSample s = sample_octahedron_any_chamber(rng);
    double lhs = 0, rhs = 0;
    for (Cx v : s.t) lhs += bloch_wigner(v);
    for (Cx v : s.u) rhs += bloch_wigner(v);
    double w = std::abs(lhs - rhs);
    auto back = move_45_inverse(s.u);
    for (int i = 0; i < 4; ++i)
      w = std::max(w, std::abs(back[static_cast<size_t>(i)] - s.t[static_cast<size_t>(i)]));
    return w;
  });
  auto w2 = parallel_max(o.samples, o.threads, o.rng_seed ^ 0x32ull,
                           [](Rng& rng) {
                             CollapsedSample s = sample_collapsed(rng);
                             double lhs = bloch_wigner(s.t[0]) -
                                          bloch_wigner(1.0 / s.t[1]) -
                                          bloch_wigner(1.0 / s.t[2]);
                             double rhs = bloch_wigner(s.u[0]) + bloch_wigner(s.u[1]);
                             double w = std::abs(lhs - rhs);
                             auto back = move_32_inverse(s.u);
                             for (int i = 0; i < 3; ++i)
                               w = std::max(w, std::abs(back[static_cast<size_t>(i)] -
                                                        s.t[static_cast<size_t>(i)]));
                             return w;
                           });
  r.lines.push_back("4-5 volume identity + roundtrip: max " + fmt_max(w1));
  r.lines.push_back("3-2 volume identity + roundtrip: max " + fmt_max(w2));
  r.samples = 2L * o.samples;
  r.max_residual = std::max(w1.worst, w2.worst);
  r.pass = r.max_residual <= r.tolerance;
  return r;
}

SuiteResult fixture_suite(const std::string& name, const SuiteOptions& o,
                          bool edges) {
  SuiteResult r;
  r.suite = edges ? "edges" : "cancellation";
  r.tolerance = edges ? 1e-9 : 1e-9;
  double worst = 0;
  for (const char* knot : {"4_1", "5_2"}) {
    ComputeOptions co;
    co.knot = knot;
    co.seeds = 200;
    co.rng_seed = o.rng_seed;
    co.threads = o.threads;
    PipelineObjects po = build_objects(co);
    SolveOptions so;
    so.seeds = co.seeds;
    so.rng_seed = co.rng_seed;
    so.threads = o.threads;
    SolutionSet h2 = solve(system_from_potential(po.W), so);
    classify(h2, po.thurston);
    SolutionSet h1 = solve(system_from_potential(po.V), so);
    classify(h1, po.yokota);
    if (edges) {
      // factor-for-factor: derivative form vs class-A product, then numerics
      for (int l = 0; l < po.vars.m; ++l) {
        int kls = po.thurston.class_of_region(po.vars.wvars[static_cast<size_t>(l)]);
        if (kls < 0) {
          r.lines.push_back(std::string(knot) + ": region without a class");
          r.pass = false;
          return r;
        }
        auto lhs = canonicalize(shape_product_form(po.W, l));
        auto rhs = canonicalize(po.thurston.class_product_form(kls));
        if (!(lhs == rhs)) {
          r.lines.push_back(std::string(knot) +
                            ": class-A product differs symbolically (w" +
                            std::to_string(l) + ")");
          r.pass = false;
          return r;
        }
        for (int i = 0; i < 100; ++i) {
          Rng rng = Rng::stream(o.rng_seed ^ 0xed6e5ull,
                                static_cast<std::uint64_t>(i * po.vars.m + l));
          std::vector<Cx> pt(static_cast<size_t>(po.vars.m));
          for (auto& p : pt) p = rng.annulus(0.2, 2.0);
          Cx a = eval_shape_product(shape_product_form(po.W, l), pt);
          Cx b = po.thurston.class_product(kls, pt);
          worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
        }
      }
      const auto& geo = h2.solutions[static_cast<size_t>(h2.geometric_index)];
      for (const auto& er : verify_edge_relations(po.thurston, geo.values))
        worst = std::max(worst, er.residual);
      worst = std::max(worst, verify_cusp(po.thurston, geo.values));
      r.lines.push_back(std::string(knot) + ": edge relations + cusp ok");
    } else {
      for (const auto& s : h1.solutions) {
        if (!s.essential) continue;
        try {
          auto wz = convert_z_to_w(s.values, po.tangle, po.vars, po.yokota,
                                   po.thurston);
          if (!po.thurston.essential(wz)) continue;
          worst = std::max(
              worst, check_cancellation(po.tangle, po.vars, s.values, wz));
        } catch (const NonEssentialImage&) {
        }
      }
      r.lines.push_back(std::string(knot) + ": remaining terms cancel");
    }
  }
  // random-sample oracles for the closed forms
  if (!edges) {
    auto w2 = parallel_max(std::max(1L, static_cast<long>(o.samples)),
                           o.threads, o.rng_seed ^ 0x2eedull, [](Rng& rng) {
                             double w = check_remaining_full_positive(rng);
                             return std::max(w, check_remaining_endpoint(rng));
                           });
    r.lines.push_back("per-crossing flattened difference vs closed form: max " +
                      fmt_max(w2));
    worst = std::max(worst, w2.worst);
  }
  r.samples = o.samples;
  r.max_residual = worst;
  r.pass = worst <= r.tolerance;
  (void)name;
  return r;
}

SuiteResult suite_numerics(const SuiteOptions& o) {
  SuiteResult r;
  r.suite = "numerics";
  r.tolerance = 1e-12;
  double worst = 0;
  // pinned values
  worst = std::max(worst, std::abs(dilog(Cx(-1, 0)) - Cx(-kPi2 / 12, 0)));
  worst = std::max(worst,
                   std::abs(dilog(Cx(0.5, 0)) -
                            Cx(kPi2 / 12 - 0.5 * std::log(2.0) * std::log(2.0), 0)));
  worst = std::max(
      worst, std::abs(bloch_wigner(std::polar(1.0, kPi / 3)) -
                      1.0149416064096536250212025542745202859417));
  r.lines.push_back("pinned values: " + std::to_string(worst));
  auto w1 = parallel_max(o.samples, o.threads, o.rng_seed, [](Rng& rng) {
    Cx z = rng.annulus(0.05, 3.0);
    if (std::abs(z - 1.0) < 1e-3 || std::abs(z) < 1e-3) return 0.0;
    double w = 0;
    // reflection
    if (z.real() < 1.0 || std::abs(z.imag()) > 1e-9) {
      Cx lhs = dilog(z) + dilog(1.0 - z);
      Cx rhs = kPi2 / 6 - clog(z) * clog(1.0 - z);
      w = std::max(w, std::abs(lhs - rhs));
    }
    // inversion, mod the branch lattice
    Cx q = dilog(z) + dilog(1.0 / z) + kPi2 / 6 + 0.5 * clog(-z) * clog(-z);
    double lnz = std::log(std::abs(z));
    if (std::abs(lnz) > 0.05) {
      double n = std::round(q.imag() / (2 * kPi * lnz));
      Cx rem = q - Cx(0, 2 * kPi * n) * clog(z);
      double m = std::round(rem.real() / (4 * kPi2));
      w = std::max(w, std::abs(rem - Cx(4 * kPi2 * m, 0)));
    }
    // Bloch-Wigner symmetries
    double D = bloch_wigner(z);
    w = std::max(w, std::abs(D + bloch_wigner(1.0 / z)));
    w = std::max(w, std::abs(D - bloch_wigner(1.0 - 1.0 / z)));
    w = std::max(w, std::abs(D - bloch_wigner(1.0 / (1.0 - z))));
    // shape triple
    auto tr = shape_triple(z);
    w = std::max(w, std::abs(tr[0] * tr[1] * tr[2] + 1.0));
    return w;
  });
  r.lines.push_back("identity battery: max " + fmt_max(w1));
  // series cross-check on |z| <= 0.5
  auto w2 = parallel_max(o.samples, o.threads, o.rng_seed ^ 0x5e1ull,
                           [](Rng& rng) {
                             Cx z = rng.annulus(0.01, 0.5);
                             Cx s(0, 0), zz = z;
                             for (int n = 1; n <= 10000; ++n) {
                               s += zz / static_cast<double>(n) / static_cast<double>(n);
                               zz *= z;
                               if (std::abs(zz) < 1e-25) break;
                             }
                             return std::abs(dilog(z) - s) /
                                    std::max(std::abs(s), 1e-30);
                           });
  r.lines.push_back("raw series agreement on |z|<=0.5: max rel " +
                    fmt_max(w2));
  r.samples = 2L * o.samples;
  r.max_residual = std::max({worst, w1.worst, w2.worst});
  r.pass = worst <= 1e-12 && w1.worst <= 1e-11 && w2.worst <= 1e-13;
  return r;
}

}  // namespace

SuiteResult run_suite(const std::string& suite, const SuiteOptions& opts) {
  if (suite == "lemma5") return suite_lemma5(opts);
  if (suite == "lemma31") return suite_lemma31(opts);
  if (suite == "moves") return suite_moves(opts);
  if (suite == "edges") return fixture_suite(suite, opts, true);
  if (suite == "cancellation") return fixture_suite(suite, opts, false);
  if (suite == "numerics") return suite_numerics(opts);
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

}  // namespace optlim
