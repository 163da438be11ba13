// Acceptance gate: one line per criterion, "PASS"/"FAIL" verdicts, nonzero
// exit iff anything failed. Each criterion runs in under a minute.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "branchlab/bohm.hpp"
#include "branchlab/bornlaw.hpp"
#include "branchlab/branching.hpp"
#include "branchlab/collapse.hpp"
#include "branchlab/finegrain.hpp"
#include "branchlab/largen.hpp"
#include "branchlab/rng.hpp"
#include "branchlab/runner.hpp"

using namespace branchlab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void verdict(int index, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  criterion %2d  %-28s  %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(double v) { return format_double(v); }

// 1. five equal-amplitude branches from weights (3/5, 2/5), exact counting
void criterion_fine_grain() {
  const FineGrainedState fg = fine_grain({Rational(3, 5), Rational(2, 5)});
  const auto probs = branch_count_probability(fg.plan);
  const bool pass = fg.branches.size() == 5 && fg.branch_amp2 == Rational(1, 5) &&
                    probs[0] == Rational(3, 5) && probs[1] == Rational(2, 5) &&
                    swap_admissibility(fg, 3, 4) == SwapVerdict::Dissimilar &&
                    swap_admissibility(fg, 1, 2) == SwapVerdict::Admissible;
  verdict(1, "fine-grain reconstruction", pass,
          "branches=" + std::to_string(fg.branches.size()) + " amp2=1/" +
              std::to_string(fg.branch_amp2.denominator()) + " swap(3,4)=dissimilar");
}

// 2. Born law: constraints, lagrange constant, composition, affine solve
void criterion_born_suite() {
  const ProbabilityLaw born = ProbabilityLaw::born();
  double worst_sum = 0.0;
  for (int n : {2, 3, 5, 8}) {
    const auto rep = check_constraints(born, n, 2000, 100 + static_cast<std::uint64_t>(n));
    worst_sum = std::max(worst_sum, std::max(rep.max_sum_violation, rep.max_range_violation));
  }
  const auto lag =
      lagrange_residual(born, {std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)});
  double lag_dev = 0.0;
  for (double v : lag.values) lag_dev = std::max(lag_dev, std::abs(v - 2.0));
  const auto comp = compose_auxiliary(
      born, {std::sqrt(0.6), std::sqrt(0.4)},
      {{1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)},
       {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}});
  const BornSolution sol = derive_born({{0, 0.6, {0.2, 0.5}},
                                        {0, 0.3, {0.2, 0.5}},
                                        {1, 0.4, {0.3, 0.6}},
                                        {1, 0.7, {0.3, 0.6}}},
                                       2);
  double sol_dev = std::abs(sol.lambda - 2.0);
  for (double c : sol.c) sol_dev = std::max(sol_dev, std::abs(c));
  const bool pass =
      worst_sum <= 1e-12 && lag_dev <= 1e-6 && comp.max_violation <= 1e-14 && sol_dev <= 1e-10;
  verdict(2, "born derivation suite", pass,
          "constraints=" + fmt(worst_sum) + " lagrange_dev=" + fmt(lag_dev) +
              " compose=" + fmt(comp.max_violation) + " solve_dev=" + fmt(sol_dev));
}

// 3. odd counterexample: two-state valid, three-state and composition fail
void criterion_counterexample() {
  const double eps = 0.05;
  const ProbabilityLaw odd = ProbabilityLaw::odd_counterexample(eps);
  const auto r2 = check_constraints(odd, 2, 2000, 200);
  const double s3 = odd.eval(0, 0.5) + odd.eval(1, 0.3) + odd.eval(2, 0.2);
  const auto comp = compose_auxiliary(odd, {std::sqrt(0.9), std::sqrt(0.1)},
                                      {{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)},
                                       {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}});
  const double expect = 0.603 * eps;
  const bool pass = r2.max_sum_violation <= 1e-12 && std::abs(s3 - 1.0) > 0.01 &&
                    std::abs(comp.max_violation - expect) <= 0.05 * expect;
  verdict(3, "counterexample scoping", pass,
          "n2=" + fmt(r2.max_sum_violation) + " n3_violation=" + fmt(std::abs(s3 - 1.0)) +
              " compose_violation=" + fmt(comp.max_violation) + " (expected ~" + fmt(expect) +
              ")");
}

// 4. branch-class concentration at N=10,000 plus exact N=20 cross-check
void criterion_concentration() {
  const std::uint64_t N = 10000;
  double amp2_total = 0.0;
  {
    double max_l = -std::numeric_limits<double>::infinity();
    std::vector<double> ls(N + 1);
    for (std::uint64_t n = 0; n <= N; ++n) {
      ls[n] = branch_class_log_amp2(N, n, 0.9);
      max_l = std::max(max_l, ls[n]);
    }
    for (double l : ls) amp2_total += std::exp(l - max_l);
    amp2_total *= std::exp(max_l);
  }
  const MacroDistribution d = induced_macro_distribution(ProbabilityLaw::born(), N, 0.9);
  double rel20 = 0.0;
  for (std::uint64_t n = 0; n <= 20; ++n) {
    const double exact = branch_class_amp2_exact(20, n, BigRational(9, 10)).convert_to<double>();
    const double approx = std::exp(branch_class_log_amp2(20, n, 0.9));
    rel20 = std::max(rel20, std::abs(approx - exact) / exact);
  }
  const bool pass = std::abs(amp2_total - 1.0) <= 1e-10 && d.mode == 9000 &&
                    std::abs(d.sigma - 30.0) <= 0.3 && rel20 <= 1e-10;
  verdict(4, "large-N concentration", pass,
          "norm_dev=" + fmt(std::abs(amp2_total - 1.0)) + " mode=" + std::to_string(d.mode) +
              " sigma=" + fmt(d.sigma) + " exact_vs_log_rel=" + fmt(rel20));
}

// 5. exact branch counting; the round claim of 10^800 is checked, not assumed
void criterion_branch_counting() {
  const std::size_t digits = decimal_digits(versions_count(10000));
  const double ratio = branch_count_ratio_log10(10000, 5000, 9000);
  const bool agrees = std::abs(ratio - 800.0) < 1.0;
  const bool pass = digits == 3011 && std::isfinite(ratio);
  verdict(5, "exact branch counting", pass,
          "2^10000_digits=" + std::to_string(digits) + " ratio_log10=" + fmt(ratio) +
              " round_claim=800 " + (agrees ? "(agrees)" : "(discrepant)"));
}

// 6. the quadratic micro-law washes out of the macro statistics but remains
// visible run by run
void criterion_washout() {
  const ProbabilityLaw aq = ProbabilityLaw::affine_quadratic(0.8, 0.2);
  bool modes_ok = true;
  for (std::uint64_t N : {100ULL, 1000ULL, 10000ULL}) {
    const MacroDistribution d = induced_macro_distribution(aq, N, 0.9);
    modes_ok = modes_ok && static_cast<double>(d.mode) == 0.9 * static_cast<double>(N);
  }
  // quadratic-term mass: exactly beta*(p^2+q^2)^N, verified against the bound
  bool mass_ok = true;
  for (std::uint64_t N : {100ULL, 1000ULL}) {
    double max_l = -std::numeric_limits<double>::infinity();
    std::vector<double> ls(N + 1);
    for (std::uint64_t n = 0; n <= N; ++n) {
      const double dn = static_cast<double>(n), dN = static_cast<double>(N);
      const double log_count =
          std::lgamma(dN + 1.0) - std::lgamma(dn + 1.0) - std::lgamma(dN - dn + 1.0);
      const double log_x = dn * std::log(0.9) + (dN - dn) * std::log(0.1);
      ls[n] = std::log(0.2) + log_count + 2.0 * log_x;
      max_l = std::max(max_l, ls[n]);
    }
    double sum = 0.0;
    for (double l : ls) sum += std::exp(l - max_l);
    const double log_mass = max_l + std::log(sum);
    const double log_bound = std::log(0.2) + static_cast<double>(N) * std::log(0.82);
    mass_ok = mass_ok && log_mass <= log_bound + 1e-9;
  }
  const RunByRunReport rr = run_by_run_experiment(aq, 10000, 0.9, 10000, 300);
  const double ci = 3.0 * std::sqrt(0.9 * 0.1 / 10000.0);
  const bool per_run_distinct = std::abs(rr.per_run_probability - 0.9) > ci &&
                                std::abs(rr.empirical_frequency - rr.per_run_probability) <= ci;
  const bool pass = modes_ok && mass_ok && per_run_distinct &&
                    rr.macro_mode_fraction == 0.9;
  verdict(6, "micro-law washout", pass,
          "modes_exact=" + std::string(modes_ok ? "yes" : "no") +
              " quad_mass_bounded=" + std::string(mass_ok ? "yes" : "no") +
              " per_run=" + fmt(rr.per_run_probability) +
              " empirical=" + fmt(rr.empirical_frequency) + " macro_mode=0.9");
}

// 7. linear evolutions cannot produce Born statistics; the martingale
// surrogate can
void criterion_collapse() {
  Rng rng(400);
  std::vector<std::vector<double>> lists;
  for (int i = 1; i <= 10; ++i) {
    const double x = static_cast<double>(i) / 11.0;
    lists.push_back({std::sqrt(x), std::sqrt(1.0 - x)});
  }
  int bitwise_fail = 0, certified = 0;
  const int families = 100;
  for (int f = 0; f < families; ++f) {
    const auto fam = LinearEvolutionFamily::random(2, 16, rng);
    const auto base = linear_X(fam, lists[0]);
    for (const auto& a : lists)
      if (linear_X(fam, a).weights != base.weights) ++bitwise_fail;
    if (born_violation_certificate(fam, lists).contradiction) ++certified;
  }
  bool stochastic_ok = true;
  std::string freqs;
  for (const auto& a : {std::vector<double>{std::sqrt(0.9), std::sqrt(0.1)},
                        std::vector<double>{std::sqrt(0.5), std::sqrt(0.5)},
                        std::vector<double>{std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)}}) {
    const CollapseStatistics st = collapse_statistics(a, 10000, CollapseParams{}, 401);
    stochastic_ok = stochastic_ok && st.pass;
    freqs += " " + fmt(st.frequency[0]);
  }
  const bool pass = bitwise_fail == 0 && certified == families && stochastic_ok;
  verdict(7, "collapse linearity theorem", pass,
          "bitwise_mismatches=" + std::to_string(bitwise_fail) + " certificates=" +
              std::to_string(certified) + "/100 stochastic_freq[0]:" + freqs);
}

// 8. branches stay orthogonal, weight-conserving, and classically recorded
void criterion_classicality() {
  std::vector<Amplitude> a{{std::sqrt(0.9), 0.0}, {std::sqrt(0.1), 0.0}};
  const BranchState pre = premeasurement(a, 2);
  const BranchState det = couple_detectors(pre);
  const BranchState obs = couple_observer(det);
  const BranchState wri = couple_writer(obs);

  double gram_dev = 0.0;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      gram_dev = std::max(gram_dev,
                          std::abs(inner_product(wri.branch_vector(i), wri.branch_vector(j)) -
                                   (i == j ? Amplitude{1, 0} : Amplitude{0, 0})));

  Rng rng(500);
  double max_offdiag = 0.0, max_drift = 0.0;
  for (int h = 0; h < 50; ++h) {
    const auto bh = BlockHamiltonian::random(2, rng);
    max_offdiag = std::max(max_offdiag, interbranch_elements(bh, det).max_offdiagonal);
    const auto w = evolve_and_check_weights(bh, det, 1.0);
    max_drift = std::max(max_drift, std::max(std::abs(w[0] - 0.9), std::abs(w[1] - 0.1)));
  }

  double max_nc = nonclassical_weight(wri);
  for (int r = 0; r < 100; ++r) {
    const auto u = random_unitary(3, rng);
    max_nc = std::max(
        max_nc, nonclassical_weight(couple_writer(
                    obs.with_state(rotate_factor(obs.state(), "observer", u)))));
  }
  const auto [plus, minus] = mixed_observer_states(obs);
  max_nc = std::max(max_nc, nonclassical_weight(couple_writer(plus)));
  max_nc = std::max(max_nc, nonclassical_weight(couple_writer(minus)));

  bool green = false;
  for (const auto& c : color_signal(det)) green = green || c == "green";

  const bool pass =
      gram_dev <= 1e-12 && max_offdiag <= 1e-12 && max_drift <= 1e-10 && max_nc <= 1e-12 && !green;
  verdict(8, "branch classicality", pass,
          "gram_dev=" + fmt(gram_dev) + " offdiag=" + fmt(max_offdiag) + " weight_drift=" +
              fmt(max_drift) + " nonclassical=" + fmt(max_nc) +
              (green ? " GREEN" : " no_green"));
}

// 9. guided trajectories reproduce the Born fractions; non-equilibrium
// densities do not
void criterion_bohm() {
  bool equi_ok = true;
  std::string fr;
  for (double a1_sq : {0.9, 0.5}) {
    const PacketPair p = PacketPair::make(std::sqrt(a1_sq), std::sqrt(1.0 - a1_sq));
    const EquivarianceReport rep = equivariance_report(p, 10000, 600);
    equi_ok = equi_ok && rep.pass;
    fr += " " + fmt(rep.fraction1);
  }

  const PacketPair p91 = PacketPair::make(std::sqrt(0.9), std::sqrt(0.1));
  const double t_end = p91.separation_time() + 0.5;
  const auto xs = sample_initial_positions(p91, 2000, 601);
  std::size_t crossings = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    double lo = xs[2 * i], hi = xs[2 * i + 1];
    if (lo > hi) std::swap(lo, hi);
    if (hi - lo < 1e-9) continue;
    const Trajectory a = integrate_trajectory(p91, lo, 0.25, t_end);
    const Trajectory b = integrate_trajectory(p91, hi, 0.25, t_end);
    for (std::size_t s = 0; s < a.times.size(); ++s)
      if (a.positions[s] >= b.positions[s]) ++crossings;
  }

  Rng rng(602);
  std::vector<double> uniform;
  for (int i = 0; i < 10000; ++i) uniform.push_back(rng.uniform(-3.0, 3.0));
  const EquivarianceReport bad = equivariance_report_for(p91, uniform);
  const double z = std::abs(bad.fraction1 - 0.9) / std::sqrt(0.9 * 0.1 / 10000.0);

  const bool pass = equi_ok && crossings == 0 && z > 5.0;
  verdict(9, "bohmian equivariance", pass,
          "fractions:" + fr + " crossings=" + std::to_string(crossings) +
              " non_equilibrium_z=" + fmt(z));
}

// 10. identical config + serial mode gives byte-identical artifacts
void criterion_reproducibility() {
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const fs::path d1 = fs::temp_directory_path() / "branchlab_accept_a";
  const fs::path d2 = fs::temp_directory_path() / "branchlab_accept_b";
  fs::remove_all(d1);
  fs::remove_all(d2);
  bool pass = true;
  std::string detail;
  const nlohmann::json docs[] = {
      {{"experiment", "large-n"}, {"seed", 77}, {"params", {{"N", 2000}, {"runs", 2000}}}},
      {{"experiment", "finegrain"}, {"seed", 77}},
  };
  for (const auto& doc : docs) {
    const std::string exp = doc.at("experiment").get<std::string>();
    ExperimentConfig c1 = parse_config(exp, doc);
    ExperimentConfig c2 = parse_config(exp, doc);
    c1.out_dir = (d1 / exp).string();
    c2.out_dir = (d2 / exp).string();
    const RunManifest m1 = run(c1);
    run(c2);
    for (const auto& name : m1.artifacts) {
      if (name == "manifest.json") continue;  // contains the output path
      if (slurp(d1 / exp / name) != slurp(d2 / exp / name)) {
        pass = false;
        detail += " mismatch:" + exp + "/" + name;
      }
    }
  }
  fs::remove_all(d1);
  fs::remove_all(d2);
  verdict(10, "byte-identical reruns", pass, pass ? "all artifacts identical" : detail);
}

}  // namespace

int main() {
  criterion_fine_grain();
  criterion_born_suite();
  criterion_counterexample();
  criterion_concentration();
  criterion_branch_counting();
  criterion_washout();
  criterion_collapse();
  criterion_classicality();
  criterion_bohm();
  criterion_reproducibility();
  if (g_failures) {
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
