#pragma once

#include <cstdint>
#include <vector>

#include "secrelay/rates.hpp"

namespace secrelay {

/// C(s) = [[s1, conj(s2)], [s2, -conj(s1)]].
Eigen::Matrix2cd alamouti_encode(Complex s1, Complex s2);
Eigen::Matrix2cd alamouti_encode(const Eigen::Vector2cd& s);

struct FrameConfig {
  int num_blocks = 1000;
  std::uint64_t seed = 0;
  bool include_direct_links = true;
};

/// Sample streams of a simulated frame. Index i runs over symbols 2(n-1)+j,
/// j in {0, 1}, of the source blocks n = 1..num_blocks.
struct FrameStreams {
  std::vector<Complex> s_A;
  std::vector<Complex> s_B;
  // Alamouti-combined samples after AF self-interference cancellation,
  // normalized by ||h_R,i^H W0||: r_A carries s_B, r_B carries s_A.
  std::vector<Complex> r_A;
  std::vector<Complex> r_B;
  // Eve's stacked observation: combined current block, previous-block sample.
  std::vector<Eigen::Vector2cd> y_E;
  // Per relay block: (1/2) ||X_R||_F^2.
  std::vector<double> relay_power;
  // Per relay slot: noiseless received power at Eve.
  std::vector<double> eve_rx_power;
  // Channels actually simulated (direct links zeroed when disabled).
  Complex h_AE{0.0, 0.0};
  Complex h_BE{0.0, 0.0};

  std::size_t size() const { return s_A.size(); }
};

FrameStreams simulate_frames(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc,
                             const FrameConfig& fc);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct EveStats {
  Eigen::Matrix2cd Psi_hat;
  Eigen::Matrix2d Psi_se;  // standard error of each entry (magnitude for off-diagonals)
  Eigen::Matrix2cd H_E_hat;
  std::size_t samples = 0;
  bool low_sample_warning = false;  // fewer than 1000 samples
};

/// Covariance of y_E - H_E s with the analytic H_E, and the cross-correlation
/// estimate of H_E itself.
EveStats empirical_eve_stats(const FrameStreams& st, const RelaySolution& sol, const ChannelSet& ch,
                             const DerivedConstants& dc);

/// Regression SINR of the symbol decoded at `node`. symbol = 0 or 1 restricts
/// to one slot of the Alamouti block, -1 uses both.
Estimate empirical_sinr(const FrameStreams& st, Node node, int symbol = -1);

Estimate empirical_relay_power(const FrameStreams& st);

Estimate empirical_harvested_power(const FrameStreams& st, double tau);

}  // namespace secrelay
