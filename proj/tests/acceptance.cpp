// Acceptance gate: ten end-to-end checks covering the numerical core, the
// reduction experiments, and the command-line figure export.  Each check
// prints exactly one PASS/FAIL line with a short measurement summary; the
// process exit status is the number of failed checks.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cviqp/circuit.hpp"
#include "cviqp/hardness.hpp"
#include "cviqp/integrator.hpp"
#include "cviqp/polynomial.hpp"
#include "cviqp/rng.hpp"
#include "cviqp/sampler.hpp"

namespace {

using namespace cviqp;

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string format(const char* fmt, ...) {
  char buffer[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buffer, sizeof buffer, fmt, args);
  va_end(args);
  return buffer;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Dense random polynomial of total degree <= 2: every quadratic pair plus
// every linear term, coefficients uniform in [-range, range].
Polynomial random_quadratic(int n, double range, std::uint64_t seed) {
  Rng rng(seed);
  Polynomial p(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::vector<int> exponents(static_cast<std::size_t>(n), 0);
      exponents[static_cast<std::size_t>(i)] += 1;
      exponents[static_cast<std::size_t>(j)] += 1;
      p.add_term(exponents, rng.uniform(-range, range));
    }
  for (int i = 0; i < n; ++i) {
    std::vector<int> exponents(static_cast<std::size_t>(n), 0);
    exponents[static_cast<std::size_t>(i)] = 1;
    p.add_term(exponents, rng.uniform(-range, range));
  }
  return p;
}

CircuitSpec degree3_circuit(int n, double range, std::uint64_t seed, double sigma,
                            double delta_p) {
  return make_circuit(n, PhaseFunction::from_polynomial(cviqp::random_degree3(n, range, seed)),
                      sigma, delta_p);
}

// 1. Squeezed grid quadrature must reproduce the exact Gaussian closed form
//    for random degree-<=2 phases across mode counts and envelope widths.
Outcome check_gaussian_oracle() {
  const auto start = std::chrono::steady_clock::now();
  const double sigmas[3] = {0.5, 1.0, 2.0};
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int n = 1 + i % 3;
    const double sigma = sigmas[(i / 3) % 3];
    const Polynomial f = random_quadratic(n, 0.3, 900 + static_cast<std::uint64_t>(i));
    const CircuitSpec c = make_circuit(n, PhaseFunction::from_polynomial(f), sigma, 0.01);
    GridSpec g = default_grid(c, 1e-8);
    if (g.k * n > 24) g = make_grid(n, g.L, 24 / n);
    Rng rng(7000 + static_cast<std::uint64_t>(i));
    Eigen::VectorXd s(n);
    for (int mode = 0; mode < n; ++mode) s[mode] = rng.uniform(-1.0, 1.0);
    const auto estimate = squeezed_amplitude_grid(c, s, g);
    const std::complex<double> closed = gaussian_closed_form(f, s, sigma, 0.01);
    worst = std::max(worst, std::abs(estimate.value - closed) / std::abs(closed));
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-4 && elapsed <= 120.0,
          format("worst rel %.2e over 20 cases, %.1f s", worst, elapsed)};
}

// 2. Lattice window probabilities of random degree-3 circuits must sum to
//    (nearly) one: the measurement windows tile the captured line.
Outcome check_unit_mass() {
  const auto start = std::chrono::steady_clock::now();
  double lo = 2.0, hi = 0.0;
  for (int i = 0; i < 3; ++i) {
    const CircuitSpec c = degree3_circuit(1, 0.2, 500 + static_cast<std::uint64_t>(i), 1.0, 0.05);
    const auto d = distribution(c, make_grid(1, default_grid(c, 1e-6).L, 12));
    lo = std::min(lo, d.total_mass);
    hi = std::max(hi, d.total_mass);
  }
  const CircuitSpec c2 = degree3_circuit(2, 0.2, 650, 1.0, 0.05);
  const auto d2 = distribution(c2, make_grid(2, default_grid(c2, 1e-6).L, 8));
  lo = std::min(lo, d2.total_mass);
  hi = std::max(hi, d2.total_mass);
  const double elapsed = seconds_since(start);
  return {lo >= 0.98 && hi <= 1.002 && elapsed <= 300.0,
          format("mass in [%.6f, %.6f] over 4 circuits, %.1f s", lo, hi, elapsed)};
}

// 3. Displacing a circuit must relabel its outcomes and nothing else: the
//    amplitude gap vanishes and the distribution shifts exactly, for
//    window-commensurate displacements on a dyadic lattice.
Outcome check_hiding() {
  double worst_gap = 0.0;
  bool shift_exact = true;
  for (int i = 0; i < 10; ++i) {
    const int n = i < 7 ? 1 : 2;
    const CircuitSpec c =
        degree3_circuit(n, 0.3, 2000 + static_cast<std::uint64_t>(i), 1.0, 0.0625);
    const GridSpec g = make_grid(n, 4.0, n == 1 ? 8 : 5);
    Rng rng(2100 + static_cast<std::uint64_t>(i));
    Eigen::VectorXd r(n), s(n);
    std::vector<std::int64_t> window_steps(static_cast<std::size_t>(n));
    for (int mode = 0; mode < n; ++mode) {
      const auto steps = static_cast<std::int64_t>(rng.uniform_index(17)) - 8;
      window_steps[static_cast<std::size_t>(mode)] = steps;
      r[mode] = 2.0 * c.delta_p * static_cast<double>(steps);
      s[mode] = rng.uniform(-1.0, 1.0);
    }
    const CircuitSpec moved = displace(c, r);
    const auto via_displaced = squeezed_amplitude_grid(moved, s, g);
    const Eigen::VectorXd shifted = r + s;
    const auto via_shifted = squeezed_amplitude_grid(c, shifted, g);
    worst_gap = std::max(worst_gap, std::abs(via_displaced.value - via_shifted.value));

    const auto base = distribution(c, g);
    const auto relabeled = distribution(moved, g);
    std::vector<std::int64_t> axes(static_cast<std::size_t>(n));
    for (std::int64_t index = 0; index < relabeled.grid.total(); ++index) {
      std::int64_t rest = index;
      bool inside = true;
      for (int mode = n - 1; mode >= 0; --mode) {
        const std::int64_t a = rest % relabeled.grid.ell + window_steps[static_cast<std::size_t>(mode)];
        axes[static_cast<std::size_t>(mode)] = a;
        rest /= relabeled.grid.ell;
        if (a < 0 || a >= base.grid.ell) inside = false;
      }
      if (!inside) continue;
      if (relabeled.probs[index] != base.probs[base.grid.encode(axes.data())])
        shift_exact = false;
    }
  }
  return {worst_gap < 1e-12 && shift_exact,
          format("worst amplitude gap %.2e, label shift exact: %s", worst_gap,
                 shift_exact ? "yes" : "no")};
}

// 4. Phase-binned estimates must honor the guaranteed bin-width bound at
//    every bin count, and halving the bin width should roughly halve the
//    empirical error.
Outcome check_binned_convergence() {
  double ratio_sum = 0.0;
  int ratio_count = 0;
  bool bound_ok = true;
  for (int i = 0; i < 10; ++i) {
    const PhaseFunction phase =
        PhaseFunction::from_polynomial(cviqp::random_degree3(2, 0.4, 101 + static_cast<std::uint64_t>(i)));
    const GridSpec g = make_grid(2, 3.0, 6);
    const Eigen::VectorXd s = Eigen::VectorXd::Zero(2);
    const auto exact = riemann_amplitude(phase, s, g);
    double previous = -1.0;
    for (int l = 3; l <= 8; ++l) {
      const auto [estimate, report] = binned_amplitude(phase, s, g, l);
      const double error = std::abs(estimate.value - exact.value);
      if (error > estimate.eps_c) bound_ok = false;
      if (previous > 0.0 && error > 0.0) {
        ratio_sum += previous / error;
        ++ratio_count;
      }
      previous = error;
    }
  }
  const double mean_ratio = ratio_sum / static_cast<double>(ratio_count);
  return {bound_ok && mean_ratio >= 1.6 && mean_ratio <= 2.4,
          format("bound respected: %s, mean halving ratio %.3f", bound_ok ? "yes" : "no",
                 mean_ratio)};
}

// 5. Reconstructing a tabulated-phase amplitude from boolean-oracle
//    population counts must agree with the direct sum.
Outcome check_oracle_reconstruction() {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const int n_oracles = 2 << (i % 3);
    int l = 0;
    while ((1 << l) < n_oracles) ++l;
    const int arity = 12 - l;
    Rng rng(3000 + static_cast<std::uint64_t>(i));
    std::vector<cviqp::BooleanOracle> oracles(static_cast<std::size_t>(n_oracles));
    for (auto& oracle : oracles) {
      oracle.arity = arity;
      oracle.table.resize(std::size_t{1} << arity);
      for (auto& bit : oracle.table) bit = static_cast<int>(rng.uniform_index(2));
    }
    const auto check = verify_sharp_p_sum(oracles, make_grid(1, 3.141592653589793, 12));
    worst = std::max(worst, check.abs_gap);
  }
  return {worst < 1e-12, format("worst reconstruction gap %.2e over 10 sets", worst)};
}

// 6. A function vanishing on every node a deterministic rule samples forces
//    identical rule outputs for +-g while keeping a visibly positive
//    integral; the node-budget bound matches its frozen value.
Outcome check_fooling() {
  Rng rng(4000);
  Eigen::MatrixXd nodes(16, 2);
  for (int i = 0; i < 16; ++i)
    for (int mode = 0; mode < 2; ++mode) nodes(i, mode) = rng.uniform(-3.0, 3.0);
  const auto instance = make_fooling_instance(std::move(nodes), 0.2);
  const auto demo = fooling_demo(instance, 1.0, make_grid(2, 4.0, 9));
  const double bound = fooling_node_bound(2, 1.0, 0.5, 0.0, 0.0);
  const bool bound_ok = std::abs(bound - 1.4715) <= 1e-3;
  return {demo.rule_outputs_identical && demo.integral_phi_g > 0.0 && bound_ok,
          format("rules identical: %s, integral %.3f, node bound %.6f",
                 demo.rule_outputs_identical ? "yes" : "no", demo.integral_phi_g, bound)};
}

// 7. In the narrow-window regime the exact window probability must match the
//    squared squeezed amplitude.
Outcome check_narrow_window() {
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const CircuitSpec c =
        degree3_circuit(1, 0.4, 1200 + static_cast<std::uint64_t>(i), 1.0, 1e-3);
    const GridSpec g = make_grid(1, 8.0, 11);
    Rng rng(1300 + static_cast<std::uint64_t>(i));
    Eigen::VectorXd s(1);
    s[0] = rng.uniform(-0.5, 0.5);
    const double exact = exact_probability_sinc_1d(c, s[0], g);
    const auto amplitude = squeezed_amplitude_grid(c, s, g);
    worst = std::max(worst, std::abs(exact - std::norm(amplitude.value)) / exact);
  }
  return {worst <= 1e-3, format("worst rel gap %.2e over 5 cubics", worst)};
}

// 8. Monte Carlo estimates must land within their own reported error bars:
//    at one million samples, within four standard errors in >= 19 of 20 seeds.
Outcome check_monte_carlo() {
  const auto start = std::chrono::steady_clock::now();
  const CircuitSpec c = degree3_circuit(3, 0.05, 5100, 1.0, 0.01);
  const GridSpec g = make_grid(3, 5.3, 8);
  const auto truth = squeezed_amplitude_grid(c, Eigen::VectorXd::Zero(3), g);
  int hits = 0;
  double worst_pull = 0.0;
  for (int seed = 1; seed <= 20; ++seed) {
    const auto mc = squeezed_amplitude_mc(c, Eigen::VectorXd::Zero(3), 1000000,
                                          static_cast<std::uint64_t>(seed));
    const double pull = std::abs(mc.value - truth.value) / mc.mc_stderr;
    worst_pull = std::max(worst_pull, pull);
    if (pull <= 4.0) ++hits;
  }
  return {hits >= 19, format("%d/20 within 4 standard errors, worst pull %.2f, %.1f s",
                             hits, worst_pull, seconds_since(start))};
}

// 9. The exhaustive anticoncentration report must agree with the
//    distribution it summarizes, respect its own second-moment floor, and
//    the Markov robustness check must accept an l1-bounded perturbation.
Outcome check_anticoncentration() {
  const CircuitSpec c = degree3_circuit(2, 0.3, 6100, 1.0, 0.5);
  const GridSpec g = make_grid(2, 12.5, 7);
  const auto report = anticoncentration_report(c, g, 0.5, 0, 1);
  const auto d = distribution(c, g);
  const double bookkeeping_gap = std::abs(report.mean_mass_scaled - d.total_mass);
  const bool floor_ok = report.frac_above_mean >= report.pz_floor - 1e-12;
  const auto exact = normalize(d);
  const auto approx = perturb(exact, 1.0 / 64.0, 1);
  const auto markov = markov_check(exact, approx, 1.0 / 64.0, 1.0 / 8.0);
  return {bookkeeping_gap <= 1e-9 && floor_ok && markov.holds && markov.fraction <= 1.0 / 8.0,
          format("bookkeeping gap %.2e, fraction %.4f >= floor %.4f, markov fraction %.4f",
                 bookkeeping_gap, report.frac_above_mean, report.pz_floor, markov.fraction)};
}

// 10. The command-line contour export must reproduce the showcase integrand
//     fields: four 400x400 tables in under 30 seconds, an exactly-unit
//     origin cell, and envelope decay beyond three widths.
Outcome check_contour_export() {
  char tmpl[] = "/tmp/cviqp_accept_XXXXXX";
  const char* dir = mkdtemp(tmpl);
  if (dir == nullptr) return {false, "cannot create a scratch directory"};
  const std::string base = dir;
  {
    std::ofstream circuit(base + "/showcase.json");
    circuit << R"({"n":2,"sigma":1.0,"delta_p":0.05,"phase":{"n":2,"terms":[
      {"exp":[1,0],"coeff":1.0},{"exp":[0,1],"coeff":-1.0},
      {"exp":[1,1],"coeff":1.0},{"exp":[2,0],"coeff":1.0},
      {"exp":[0,2],"coeff":-1.0},{"exp":[1,2],"coeff":-1.0},
      {"exp":[2,1],"coeff":-1.0},{"exp":[3,0],"coeff":1.0},
      {"exp":[0,3],"coeff":1.0}]}})";
  }
  const auto start = std::chrono::steady_clock::now();
  const std::string command = "\"" CVIQP_BIN "\" contour --circuit " + base +
                              "/showcase.json --resolution 400 --L 4.0 --sigmas inf,3,1.5,1"
                              " --out-prefix " + base + "/fig >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  const double elapsed = seconds_since(start);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    return {false, format("contour command failed with status %d", status)};

  bool origins_ok = true, decay_ok = true;
  for (const char* token : {"inf", "3", "1.5", "1"}) {
    std::ifstream in(base + "/fig_sigma_" + token + ".csv");
    std::string line;
    std::getline(in, line);  // q1 axis header
    std::vector<double> q1;
    {
      std::stringstream header(line);
      std::string cell;
      std::getline(header, cell, ',');  // corner label
      while (std::getline(header, cell, ',')) q1.push_back(std::strtod(cell.c_str(), nullptr));
    }
    int rows = 0;
    while (std::getline(in, line)) {
      std::stringstream row(line);
      std::string cell;
      std::getline(row, cell, ',');
      const double q2 = std::strtod(cell.c_str(), nullptr);
      int col = 0;
      while (std::getline(row, cell, ',')) {
        const double value = std::strtod(cell.c_str(), nullptr);
        const double q1v = q1[static_cast<std::size_t>(col)];
        if (q1v == 0.0 && q2 == 0.0 && value != 1.0) origins_ok = false;
        if (token[0] == '1' && token[1] == '\0' && q1v * q1v + q2 * q2 > 9.0 &&
            std::abs(value) > std::exp(-4.5) + 1e-12)
          decay_ok = false;
        ++col;
      }
      if (col != 400) return {false, "unexpected contour row width"};
      ++rows;
    }
    if (rows != 400 || q1.size() != 400) return {false, "unexpected contour table shape"};
  }
  return {elapsed <= 30.0 && origins_ok && decay_ok,
          format("4 tables in %.1f s, origin cells unit: %s, tail decay: %s", elapsed,
                 origins_ok ? "yes" : "no", decay_ok ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const std::array<Criterion, 10> criteria{{
      {"squeezed grid amplitudes match the Gaussian closed form", check_gaussian_oracle},
      {"outcome distributions capture unit mass", check_unit_mass},
      {"displacement hiding relabels outcomes exactly", check_hiding},
      {"phase-binned estimates converge within the guaranteed bound", check_binned_convergence},
      {"boolean-oracle bin counts reconstruct the amplitude", check_oracle_reconstruction},
      {"fooling instances blind the deterministic rule", check_fooling},
      {"narrow windows validate the squared-amplitude probability", check_narrow_window},
      {"monte carlo estimates agree with the grid within reported error", check_monte_carlo},
      {"anticoncentration bookkeeping and perturbation robustness hold", check_anticoncentration},
      {"contour export reproduces the showcase fields in time", check_contour_export},
  }};

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.ok) ++failures;
    std::printf("%s criterion %zu: %s (%s)\n", outcome.ok ? "PASS" : "FAIL", i + 1,
                criteria[i].name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
