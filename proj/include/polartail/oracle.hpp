#pragma once

#include <vector>

#include "polartail/problem.hpp"

namespace polartail {

// Two Exponential(1) summands glued by the independence, Clayton(1) or
// AMH(-1) copula; closed forms for the density of S and of Theta_1 | S.
enum class ExpExample { Ind, Clayton1, AMHneg1 };

ProblemSpec exp_example_spec(ExpExample kind);
double exp_sum_density(ExpExample kind, double s);
double exp_angular_density(ExpExample kind, double s, double theta);

// f_S(s) for d = 2 as the line integral of f_X over x_1 + x_2 = s.
double sum_density_2d(const ProblemSpec& spec, double s);

// P(X_1 + X_2 > gamma) by nested quadrature in (s, theta): the outer
// integral over s runs on doubling panels from gamma, the inner one is
// sum_density_2d.
double brute_truth_2d(const ProblemSpec& spec, double gamma);

// gamma with brute_truth_2d(spec, gamma) = target, to 1e-10 in log gamma.
double gamma_for_target_2d(const ProblemSpec& spec, double target);

// Independent Lognormal(0, 1) and Lognormal(0, 3/4) summands.
ProblemSpec fig1_spec();

enum class AsymTerms { OneTerm, TwoTerms };

// Ratio of the subexponential asymptotic (dominant survival, or both
// survivals) to the exact tail for fig1_spec.
double fig1_ratio(double gamma, AsymTerms terms);

struct Fig1Point {
  double gamma;
  double truth;
  double ratio_one;
  double ratio_two;
};

// `points` log-spaced gammas between the levels where the tail is 1e-2 and
// 1e-12.
std::vector<Fig1Point> fig1_curve(int points);

}  // namespace polartail
