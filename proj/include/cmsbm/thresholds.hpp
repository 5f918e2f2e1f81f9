#pragma once

#include <Eigen/Dense>

#include "cmsbm/params.hpp"

namespace cmsbm {

// Two printed forms of the combined-information threshold. Intro squares
// nothing in the per-layer term; Section3 squares the layer strength in
// both numerator and denominator.
enum class FormulaVariant { Intro, Section3 };

// max{ mu^2/gamma, max_l eps_l^2 lambda_l, mu^2/gamma + sum_l (combined term) }.
// A combined term whose denominator is not positive is left out of the
// maximum; in that regime some eps_l^2 lambda_l already exceeds 1.
double threshold_F(const ModelParams& params, FormulaVariant variant);

// (L+1)x(L+1) interaction matrix: row c scaled by the squared strength of
// channel c, spike/layer correlation rho^2, layer/layer rho^4, unit diagonal.
Eigen::MatrixXd interaction_matrix(const ModelParams& params);

// Symmetric conjugate U V U with U = diag(sqrt(strength)); same spectrum.
Eigen::MatrixXd symmetric_interaction(const ModelParams& params);

double sigma_plus(const ModelParams& params);

// Sums of squared walk weights over all color words of length aleph that
// start with each channel: P^(aleph-1) v0 with v0 the strength vector.
Eigen::VectorXd word_recursion(const ModelParams& params, int aleph);

struct Chi2Surrogate {
    enum class Reason { Finite, LayerFactor, SpikeFactor };
    double value;
    Reason reason;
};

// Closed form of E exp(((1+t)^2 mu^2/gamma U^2 + sum_l eps^2 lambda V_l^2) / 2)
// for the Gaussian surrogate (U, V_1..V_L). +inf when a factor diverges.
Chi2Surrogate chi2_surrogate(const ModelParams& params, double t);

// Common lambda for all layers such that threshold_F hits target, searched
// on the branch below the first pole of the combined term.
double lambda_for_threshold(const ModelParams& params, double target, FormulaVariant variant);

}  // namespace cmsbm
