#pragma once

#include <cstdint>
#include <vector>

#include "noma/scenario.hpp"

namespace noma {

// Joint maximum-likelihood detection over the superposed constellation of
// all colliding users. Symbol indices: BPSK m in {0,1} -> s = +1, -1;
// QPSK m = 2*b0 + b1 -> s = ((1-2*b0) + i*(1-2*b1))/sqrt(2), so bit errors
// between true and decoded index are popcount(m ^ mhat).
struct JointHypothesisSet {
  Modulation modulation = Modulation::BPSK;
  int n_users = 0;
  int m_ary = 2;      // constellation size per user
  int n_hyp = 0;      // m_ary^n_users
  std::vector<double> re, im;  // superposed noiseless point per hypothesis
};

/// Builds all m^n superposed points for users with the given received
/// amplitudes (sqrt of the linear SNR levels). User 0 is the most
/// significant digit of the hypothesis index.
JointHypothesisSet build_hypotheses(const std::vector<double>& amplitudes, Modulation mod);

/// Index of the minimum-distance hypothesis; exact ties resolve to the
/// lowest hypothesis index.
int nearest_hypothesis(const JointHypothesisSet& hyp, double y_re, double y_im);

/// Symbol index of `user` under joint hypothesis `h`.
int hypothesis_symbol(const JointHypothesisSet& hyp, int h, int user);

inline int bits_per_symbol(Modulation mod) { return mod == Modulation::BPSK ? 1 : 2; }

/// Joint hypothesis index from one packed symbol word; user j occupies bits
/// [j*bps, (j+1)*bps), so a 32-bit word covers every collision size the
/// hypothesis-set guards admit.
inline int hypothesis_from_word(std::uint32_t word, const JointHypothesisSet& hyp) {
  int h = 0;
  const int bps = hyp.m_ary == 2 ? 1 : 2;
  for (int j = 0; j < hyp.n_users; ++j) {
    const int m = static_cast<int>((word >> (bps * j)) & static_cast<std::uint32_t>(hyp.m_ary - 1));
    h = h * hyp.m_ary + m;
  }
  return h;
}

/// One-shot detection: decodes every colliding user's symbol index from a
/// received sample, given the true chosen amplitudes (genie-aided).
std::vector<int> joint_ml_detect(double y_re, double y_im,
                                 const std::vector<double>& amplitudes, Modulation mod);

}  // namespace noma
