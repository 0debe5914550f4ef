#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "cqnls/config.hpp"
#include "cqnls/dispersive.hpp"
#include "cqnls/evolution.hpp"
#include "cqnls/resonance.hpp"
#include "cqnls/snapshot.hpp"

using nlohmann::json;
using namespace cqnls;

namespace {

const char* build_id() {
#ifdef CQNLS_BUILD_ID
  return CQNLS_BUILD_ID;
#else
  return "unknown";
#endif
}

void write_comment_header(std::ofstream& f, const RunConfig& rc) {
  f << "# build: " << build_id() << "\n";
  std::istringstream in(rc.text);
  std::string line;
  while (std::getline(in, line)) f << "# config: " << line << "\n";
}

PhaseType phase_of(const std::string& s) {
  if (s == "conj2") return PhaseType::conj2;
  if (s == "plain2") return PhaseType::plain2;
  return PhaseType::mixed;
}

int cmd_simulate(const std::string& cfg_path, const std::string& out_override) {
  RunConfig rc = load_config(cfg_path);
  if (!out_override.empty()) rc.out_dir = out_override;
  Trajectory tr = run(rc.sim);

  std::string base = rc.out_dir + "/" + rc.prefix;
  std::ofstream csv(base + "_diagnostics.csv");
  write_comment_header(csv, rc);
  csv.precision(17);
  csv << "t,energy,l2_u,l6_v,l6_uinv_v,u2_mean,zero_amp,boundary_frac,cross_diff\n";
  for (const auto& d : tr.diagnostics)
    csv << d.t << ',' << d.energy << ',' << d.l2_u << ',' << d.l6_v << ','
        << d.l6_uinv_v << ',' << d.u2_mean << ',' << d.zero_amp << ','
        << d.boundary_frac << ',' << d.cross_diff << '\n';

  int idx = 0;
  for (const auto& snap : tr.snapshots) {
    SnapshotFile sf;
    sf.d = snap.v.grid.d;
    sf.m = snap.v.grid.m;
    sf.L = snap.v.grid.L;
    sf.t = snap.t;
    sf.tag = "v";
    sf.u2_mean = snap.u2_mean;
    sf.beta = rc.sim.beta;
    sf.data = snap.v.v;
    write_snapshot(base + "_snap" + std::to_string(idx++) + ".cqns", sf);
  }
  std::cout << "wrote " << base << "_diagnostics.csv (" << tr.diagnostics.size()
            << " rows), " << idx << " snapshots, max solver gap "
            << tr.max_cross_diff << "\n";
  return 0;
}

int cmd_dispersive(double N, double t_lo, double t_hi, int nt,
                   const std::string& out) {
  std::vector<double> ts(nt);
  for (int i = 0; i < nt; ++i)
    ts[i] = t_lo * std::pow(t_hi / t_lo, nt == 1 ? 0.5 : double(i) / (nt - 1));
  DispersiveAudit a = dispersive_audit(N, ts);
  std::ofstream csv(out);
  csv << "# build: " << build_id() << "\n";
  csv.precision(17);
  csv << "t,sup,r_at,claimed,ratio\n";
  for (const auto& d : a.points)
    csv << d.t << ',' << d.sup << ',' << d.r_at << ',' << d.claimed << ','
        << d.sup / d.claimed << '\n';
  std::cout << "N=" << N << " slope=" << a.slope << " envelope ratio ["
            << a.env_ratio_min << ", " << a.env_ratio_max << "] -> " << out << "\n";
  return 0;
}

json region_record(const RegionFamily& fam, const std::string& phase) {
  json rec;
  rec["phase"] = phase;
  rec["N1"] = fam.N1;
  rec["N2"] = fam.N2;
  rec["partition_residual"] = partition_residual(fam, fam.cfg.n_support_samples,
                                                 fam.cfg.seed);
  for (const auto& d : audit_denominators(fam)) {
    json jd{{"region", d.region},   {"name", d.name},
            {"n_support", d.n_support}, {"min_denom", d.min_denom},
            {"min_ratio", d.min_ratio}, {"positive", d.positive}};
    rec["denominators"].push_back(jd);
  }
  return rec;
}

int cmd_atlas(const std::string& cfg_path, bool with_bounds, const std::string& out) {
  RunConfig rc = cfg_path.empty() ? RunConfig{} : load_config(cfg_path);
  AtlasConfig ac;
  ac.beta = rc.sim.beta;
  ac.a_variant = rc.audits.a_variant;
  ac.mixed_C = rc.audits.mixed_C;
  ac.n_support_samples = rc.audits.n_samples;

  std::ofstream jl(out);
  jl.precision(17);
  json head{{"build", build_id()}, {"config", rc.text}};
  jl << head.dump() << "\n";
  for (const auto& ph : rc.audits.phases) {
    for (double N1 = rc.audits.dyad_lo; N1 <= rc.audits.dyad_hi * 1.0000001; N1 *= 2) {
      for (double N2 = rc.audits.dyad_lo; N2 <= rc.audits.dyad_hi * 1.0000001; N2 *= 2) {
        RegionFamily fam = build_region_family(phase_of(ph), N1, N2, ac);
        json rec = region_record(fam, ph);
        if (with_bounds) {
          for (const auto& b : audit_multiplier_bounds(fam)) {
            json jb{{"region", b.region}, {"name", b.name}, {"measured", b.measured},
                    {"claimed", b.claimed}, {"ratio", b.ratio}, {"empty", b.empty}};
            rec["bounds"].push_back(jb);
          }
        }
        jl << rec.dump() << "\n";
      }
    }
  }
  std::cout << "atlas audit -> " << out << "\n";
  return 0;
}

int cmd_opnorm() {
  // estimator calibration: Gaussian H1 factor and dyadic-bump dilation invariance
  Symbol2 g = Symbol2::scalar([](const V3&, const V3& x2) {
    return std::exp(-dot3(x2, x2));
  });
  SupportSpec sp;
  sp.r1_lo = 0;
  sp.r1_hi = 6;
  sp.r2_lo = 0;
  sp.r2_hi = 6;
  OpNormConfig oc;
  oc.force_ordering = 1;
  oc.check_tail = false;
  OpNormResult r = opnorm_estimate(g, sp, oc);
  double exact = std::sqrt(3 * std::pow(M_PI / 2, 1.5));
  json out{{"build", build_id()},
           {"gaussian_h1", r.h1_sup[1]},
           {"gaussian_h1_exact", exact},
           {"gaussian_h1_rel_err", std::abs(r.h1_sup[1] - exact) / exact}};
  for (double N : {0.25, 1.0, 4.0}) {
    Symbol2 b = Symbol2::scalar([N](const V3&, const V3& x2) {
      return lp_psi_fat(norm3(x2) / N);
    });
    SupportSpec s2;
    s2.r1_lo = 0;
    s2.r1_hi = 2.2 * N;
    s2.r2_lo = N / 4;
    s2.r2_hi = 2.2 * N;
    s2.radial_features = {N / 4, N / 2, 1.1 * N, 2.2 * N};
    s2.radial_feature_width = N / 25;
    OpNormResult rb = opnorm_estimate(b, s2, oc);
    out["dilation"].push_back({{"N", N}, {"op", rb.value}});
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_verify(const std::string& suite) {
  AtlasConfig ac;
  int bad = 0;
  std::vector<double> dyads;
  for (double N = 0.125; N <= 8.0001; N *= 2) dyads.push_back(N);
  for (auto ph : {PhaseType::conj2, PhaseType::plain2, PhaseType::mixed}) {
    for (double N1 : dyads)
      for (double N2 : dyads) {
        RegionFamily fam = build_region_family(ph, N1, N2, ac);
        int n = suite == "full" ? 100000 : 20000;
        double res = partition_residual(fam, n, ac.seed);
        if (res > 1e-10) {
          ++bad;
          std::cout << "FAIL partition phase=" << int(ph) << " N1=" << N1
                    << " N2=" << N2 << " residual=" << res << "\n";
        }
        for (const auto& d : audit_denominators(fam))
          if (!d.positive) {
            ++bad;
            std::cout << "FAIL denom " << d.name << " N1=" << N1 << " N2=" << N2
                      << " min=" << d.min_denom << "\n";
          }
      }
  }
  std::cout << (bad == 0 ? "verify: all checks passed" : "verify: FAILURES") << "\n";
  return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral laboratory for a cubic-quintic Schrodinger flow on a constant background"};
  app.require_subcommand(1);

  std::string cfg_path, out_path, suite = "fast";
  double N = 1, t_lo = 10, t_hi = 1000;
  int nt = 25;
  bool with_bounds = false;

  auto* sim = app.add_subcommand("simulate", "run the time evolution from a config file");
  sim->add_option("--config", cfg_path, "config file")->required();
  sim->add_option("--out", out_path, "output directory override");

  auto* disp = app.add_subcommand("dispersive", "frequency-localized decay audit");
  disp->add_option("--N", N, "dyadic scale");
  disp->add_option("--t-lo", t_lo, "window start");
  disp->add_option("--t-hi", t_hi, "window end");
  disp->add_option("--nt", nt, "number of times");
  disp->add_option("--out", out_path, "csv path")->required();

  auto* atl = app.add_subcommand("atlas", "region-family audits as JSON lines");
  atl->add_option("--config", cfg_path, "config file (optional)");
  atl->add_flag("--bounds", with_bounds, "include operator-size estimates (slow)");
  atl->add_option("--out", out_path, "jsonl path")->required();

  app.add_subcommand("opnorm", "operator-size estimator calibration report");

  auto* ver = app.add_subcommand("verify", "partition and denominator sweep");
  ver->add_option("--suite", suite, "fast|full")->check(CLI::IsMember({"fast", "full"}));

  auto* info = app.add_subcommand("info", "build information");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(cfg_path, out_path);
    if (disp->parsed()) return cmd_dispersive(N, t_lo, t_hi, nt, out_path);
    if (atl->parsed()) return cmd_atlas(cfg_path, with_bounds, out_path);
    if (app.get_subcommand("opnorm")->parsed()) return cmd_opnorm();
    if (ver->parsed()) return cmd_verify(suite);
    if (info->parsed()) {
      std::cout << "build: " << build_id() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
