#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mp/baselines.hpp"
#include "mp/gradcheck.hpp"
#include "mp/io.hpp"
#include "mp/isgmr.hpp"
#include "mp/trwp.hpp"

namespace {

struct RunOpts {
  std::string method = "isgmr";
  int dirs = 4;
  int iters = 5;
  std::string pairwise = "potts";
  double trunc = -1.0;
  double p1 = 1.0, p2 = 1.0;
  double rho = 0.5;
  int max_disp = 8;
  std::string unary_file;
  std::string left_file, right_file, image_file;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string precision = "f32";
  int height = 32, width = 32;
  double weight = 1.0;
  std::string out_csv = "run.csv";
  std::string out_labels = "labels.pgm";
  int timing_repeats = 0;
};

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

mp::PairwiseKind parse_pairwise(const std::string& name) {
  if (name == "potts") return mp::PairwiseKind::potts;
  if (name == "tl") return mp::PairwiseKind::truncated_linear;
  if (name == "tq") return mp::PairwiseKind::truncated_quadratic;
  if (name == "p1p2") return mp::PairwiseKind::sgm_p1p2;
  throw CLI::ValidationError("--pairwise", "unknown pairwise '" + name + "'");
}

template <class Real>
mp::UnaryVolume<Real> make_unaries(const RunOpts& o) {
  if (!o.unary_file.empty()) return mp::load_cost_volume<Real>(o.unary_file);
  if (!o.left_file.empty() || !o.right_file.empty()) {
    if (o.left_file.empty() || o.right_file.empty())
      throw CLI::ValidationError("--left/--right", "both stereo images are required");
    return mp::stereo_unaries<Real>(mp::load_pgm(o.left_file), mp::load_pgm(o.right_file),
                                    o.max_disp);
  }
  if (!o.image_file.empty()) {
    const auto kind = parse_pairwise(o.pairwise);
    const double tau = o.trunc > 0 ? o.trunc : std::numeric_limits<double>::infinity();
    return mp::denoise_unaries<Real>(mp::load_pgm(o.image_file), o.max_disp,
                                     kind == mp::PairwiseKind::truncated_quadratic
                                         ? mp::PairwiseKind::truncated_quadratic
                                         : mp::PairwiseKind::truncated_linear,
                                     tau);
  }
  // Synthetic fallback: a seeded random volume, handy for smoke runs.
  mp::UnaryVolume<Real> vol(o.height, o.width, o.max_disp);
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> u(0.0, 8.0);
  for (auto& v : vol.values) v = static_cast<Real>(u(rng));
  return vol;
}

template <class Real>
int run_with(const RunOpts& o) {
  const mp::PairwiseKind kind = parse_pairwise(o.pairwise);
  mp::PotentialSet<Real> pots;
  pots.unary = make_unaries<Real>(o);
  mp::PairwiseParams params;
  params.trunc = o.trunc;
  params.p1 = o.p1;
  params.p2 = o.p2;
  pots.pairwise = mp::build_pairwise<Real>(kind, params, pots.unary.labels);
  pots.weights = mp::EdgeWeights<Real>::constant(static_cast<Real>(o.weight));

  const mp::GridGraph g(pots.unary.height, pots.unary.width);
  const mp::GridTopology topo(g, mp::DirectionSet::build(o.dirs));
  // Energies are always reported on the 4-connected edge set, whatever the
  // message-passing connectivity.
  const mp::GridTopology eval4(g, mp::DirectionSet::build(4));
  const mp::TreeCoefficients<Real> rho = mp::default_rho<Real>(o.dirs, static_cast<Real>(o.rho));

  std::vector<mp::EnergyRow> rows;
  mp::CostOutput<Real> final_out;

  auto record = [&](int k, double ms, mp::CostOutput<Real> out) {
    rows.push_back({k + 1, mp::energy(eval4, pots, out.labels_map), ms});
    final_out = std::move(out);
  };

  if (o.method == "isgmr") {
    mp::IsgmrEngine<Real> eng(topo, pots, o.threads);
    for (int k = 0; k < o.iters; ++k) {
      const double t0 = now_ms();
      eng.step();
      const double t1 = now_ms();
      record(k, t1 - t0, eng.aggregate());
    }
  } else if (o.method == "trwp") {
    mp::TrwpEngine<Real> eng(topo, pots, rho, o.threads);
    for (int k = 0; k < o.iters; ++k) {
      const double t0 = now_ms();
      eng.step();
      const double t1 = now_ms();
      record(k, t1 - t0, eng.aggregate());
    }
  } else if (o.method == "sgm" || o.method == "sgm-std") {
    const auto variant = o.method == "sgm" ? mp::SgmVariant::revised : mp::SgmVariant::standard;
    mp::SgmIterative<Real> eng(topo, pots, variant, o.threads);
    for (int k = 0; k < o.iters; ++k) {
      const double t0 = now_ms();
      mp::CostOutput<Real> out = eng.step();
      const double t1 = now_ms();
      record(k, t1 - t0, std::move(out));
    }
  } else if (o.method == "mf") {
    mp::MeanFieldEngine<Real> eng(topo, pots, o.threads);
    for (int k = 0; k < o.iters; ++k) {
      const double t0 = now_ms();
      eng.step();
      const double t1 = now_ms();
      record(k, t1 - t0, eng.costs());
    }
  } else {
    throw CLI::ValidationError("--method", "unknown method '" + o.method + "'");
  }

  mp::write_energy_csv(o.out_csv, rows);
  mp::save_label_map(o.out_labels, pots.unary.height, pots.unary.width, final_out.labels_map);
  std::printf("method=%s dirs=%d iters=%d final_energy=%.10g\n", o.method.c_str(), o.dirs, o.iters,
              rows.back().energy);

  if (o.timing_repeats > 0) {
    double total = 0.0;
    for (int rep = 0; rep < o.timing_repeats; ++rep) {
      const double t0 = now_ms();
      if (o.method == "trwp") {
        mp::trwp_forward(topo, pots, rho, o.iters, o.threads);
      } else if (o.method == "isgmr") {
        mp::isgmr_forward(topo, pots, o.iters, o.threads);
      } else {
        mp::sgm_iterative(topo, pots, o.iters,
                          o.method == "sgm-std" ? mp::SgmVariant::standard
                                                : mp::SgmVariant::revised,
                          o.threads);
      }
      total += now_ms() - t0;
    }
    std::printf("mean_forward_ms=%.3f over %d repeats\n", total / o.timing_repeats,
                o.timing_repeats);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Min-sum message passing on grid MRFs"};
  app.require_subcommand(1);

  RunOpts o;
  CLI::App* run = app.add_subcommand("run", "Run inference and write CSV + label map");
  run->add_option("--method", o.method, "sgm | sgm-std | isgmr | trwp | mf");
  run->add_option("--dirs", o.dirs, "connectivity: 4, 8 or 16");
  run->add_option("--iters", o.iters, "iterations")->check(CLI::PositiveNumber);
  run->add_option("--pairwise", o.pairwise, "potts | tl | tq | p1p2");
  run->add_option("--trunc", o.trunc, "truncation tau for tl/tq");
  run->add_option("--p1", o.p1, "P1 for p1p2");
  run->add_option("--p2", o.p2, "P2 for p1p2");
  run->add_option("--rho", o.rho, "tree coefficient for trwp");
  run->add_option("--max-disp", o.max_disp, "label count for stereo/synthetic unaries");
  run->add_option("--unary-file", o.unary_file, "MPCV1 cost volume input");
  run->add_option("--left", o.left_file, "left PGM for stereo unaries");
  run->add_option("--right", o.right_file, "right PGM for stereo unaries");
  run->add_option("--image", o.image_file, "noisy PGM for denoising unaries");
  run->add_option("--seed", o.seed, "seed for synthetic unaries");
  run->add_option("--threads", o.threads, "worker threads");
  run->add_option("--precision", o.precision, "f32 | f64");
  run->add_option("--height", o.height, "synthetic grid height");
  run->add_option("--width", o.width, "synthetic grid width");
  run->add_option("--weight", o.weight, "constant edge weight");
  run->add_option("--out-csv", o.out_csv, "per-iteration energy CSV path");
  run->add_option("--out-labels", o.out_labels, "label map output (16-bit PGM)");
  run->add_option("--timing-repeats", o.timing_repeats, "extra timed forward repeats");

  mp::GradCheckConfig gc;
  std::string gc_method = "isgmr";
  double gc_tol = 1e-4;
  CLI::App* check = app.add_subcommand("grad-check", "Finite-difference gradient check");
  check->add_option("--method", gc_method, "isgmr | trwp");
  check->add_option("--height", gc.height, "grid height");
  check->add_option("--width", gc.width, "grid width");
  check->add_option("--labels", gc.labels, "label count");
  check->add_option("--dirs", gc.connectivity, "connectivity: 4, 8 or 16");
  check->add_option("--iters", gc.iterations, "iterations")->check(CLI::PositiveNumber);
  check->add_option("--rho", gc.rho, "tree coefficient for trwp");
  check->add_option("--seed", gc.seed, "instance seed");
  check->add_option("--tol", gc_tol, "max relative error to accept");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (o.precision == "f64") return run_with<double>(o);
      if (o.precision == "f32") return run_with<float>(o);
      throw CLI::ValidationError("--precision", "unknown precision '" + o.precision + "'");
    }
    if (gc_method == "trwp")
      gc.engine = mp::Engine::trwp;
    else if (gc_method != "isgmr")
      throw CLI::ValidationError("--method", "grad-check supports isgmr | trwp");
    const mp::GradCheckReport rep = mp::gradient_check(gc);
    std::printf("max relative error = %.3e over %zu components (seed %llu, %zu tie points skipped)\n",
                rep.max_rel_err, rep.components,
                static_cast<unsigned long long>(rep.seed_used), rep.skipped_ties);
    if (rep.max_rel_err < gc_tol) return 0;
    std::fprintf(stderr, "gradient check failed: %.3e >= %.3e\n", rep.max_rel_err, gc_tol);
    return 1;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
