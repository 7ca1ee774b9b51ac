#pragma once

#include <iosfwd>
#include <string>

#include "ivlate/bayes.hpp"
#include "ivlate/decide.hpp"
#include "ivlate/sim.hpp"

namespace ivlate::csv {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double x);

// Column orders are part of the file contract:
//   production sample: y_obs,x_obs,v,log_w
//   trial sample:      z,d,y
//   draws:             pi_a,pi_n,pi_c,p_a1,p_n0,p_c1,p_c0
//   sensitivity:       m_a0,m_n1,D,action
void write_production_sample(std::ostream& out, const sim::ObservationalSample& sample);
void write_trial_sample(std::ostream& out, const sim::TrialSample& sample);
void write_draws(std::ostream& out, const bayes::PosteriorDraws& draws);
void write_sensitivity(std::ostream& out, const decide::SensitivityTable& table);

// Readers throw IoError with a line diagnostic on malformed input. The
// returned draws carry a digest of the parsed values as provenance; prior
// and sampler config are not recoverable from a CSV and stay default.
sim::TrialSample read_trial_sample(std::istream& in);
bayes::PosteriorDraws read_draws(std::istream& in);

}  // namespace ivlate::csv
