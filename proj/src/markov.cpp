#include "dcf/markov.hpp"

#include "dcf/error.hpp"

#include <cmath>

namespace dcf {

void
BackoffParams::validate() const
{
  if (cw_min < 1)
    throw DomainError("cw_min must be at least 1");
  if (max_stage < 0 || max_stage > 20)
    throw DomainError("max_stage must be in 0..20");
  if ((static_cast<long long>(cw_min) << max_stage) > (1LL << 30))
    throw DomainError("W_0 2^m is too large");
}

namespace markov {

namespace {

// sum_{i=0}^{m-1} (2p)^i. Equal to (1 - (2p)^m) / (1 - 2p) away from p = 1/2
// and to m at p = 1/2, without the division.
double
doubling_sum(double p, int m)
{
  const double x = 2.0 * p;
  double acc = 0.0;
  for (int i = 0; i < m; ++i)
    acc = acc * x + 1.0;
  return acc;
}

void
check_probability(double p, const char *what)
{
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError(std::string(what) + " must lie in [0, 1]");
}

} // namespace

double
equivalent_failure_prob(double p_col, double p_e)
{
  check_probability(p_col, "P_col");
  check_probability(p_e, "P_e");
  return p_col + p_e - p_e * p_col;
}

double
alpha(const BackoffParams &bo, double p_eq)
{
  check_probability(p_eq, "P_eq");
  if (p_eq >= 1.0)
    throw DomainError("alpha diverges at P_eq = 1");
  const int m = bo.max_stage;
  const double w0 = bo.cw_min;
  const double tail = std::pow(2.0 * p_eq, m) / (1.0 - p_eq);
  return 0.5 * (w0 * (doubling_sum(p_eq, m) + tail) + 1.0 / (1.0 - p_eq));
}

double
tau_general(double b_idle, double alpha, double p_eq)
{
  check_probability(b_idle, "b_I");
  if (!(alpha >= 1.0))
    throw DomainError("alpha must be at least 1");
  if (!(p_eq >= 0.0 && p_eq < 1.0))
    throw DomainError("P_eq must lie in [0, 1)");
  return (1.0 - b_idle) / (alpha * (1.0 - p_eq));
}

double
tau_small_queue(double q, const BackoffParams &bo, double p_eq)
{
  check_probability(q, "q");
  check_probability(p_eq, "P_eq");
  // Numerator and D share the factor (1 - 2 P_eq), which is divided out.
  const double w0 = bo.cw_min;
  const double reduced = q * ((w0 + 1.0) + w0 * p_eq * doubling_sum(p_eq, bo.max_stage))
                         + 2.0 * (1.0 - q) * (1.0 - p_eq);
  if (!(reduced > 0.0))
    throw DomainError("degenerate parameters: D(q, W_0, m, P_eq) = 0");
  return 2.0 * q / reduced;
}

double
queue_nonempty_prob(double lambda_pkt_s, double t_av_s)
{
  if (std::isinf(lambda_pkt_s))
    return 1.0;
  if (!(lambda_pkt_s >= 0.0))
    throw DomainError("arrival rate must be non-negative");
  if (!(t_av_s > 0.0))
    throw DomainError("T_av must be positive");
  return -std::expm1(-lambda_pkt_s * t_av_s);
}

StationChainState
solve_chain(double q, double p_i0, const BackoffParams &bo, double p_eq)
{
  check_probability(q, "q");
  check_probability(p_i0, "P_I0");
  StationChainState st;
  st.q = q;
  st.p_i0 = p_i0;
  st.p_eq = p_eq;
  st.alpha = alpha(bo, p_eq);
  if (q >= 1.0)
    {
      st.b_idle = 0.0;
      st.b00 = 1.0 / st.alpha;
    }
  else if (p_i0 <= 0.0)
    {
      // No arrivals ever: the chain is absorbed in the idle state.
      st.b_idle = 1.0;
      st.b00 = 0.0;
    }
  else
    {
      // b_I = (1 - q) / P_I0 * b_00 and b_I + alpha b_00 = 1.
      const double ratio = (1.0 - q) / p_i0;
      st.b00 = 1.0 / (st.alpha + ratio);
      st.b_idle = ratio * st.b00;
    }
  st.tau = st.b00 / (1.0 - p_eq);
  return st;
}

double
ChainDistribution::total() const
{
  // compensated sum
  double sum = 0.0;
  double comp = 0.0;
  auto add = [&](double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };
  for (const auto &stage : b)
    for (double v : stage)
      add(v);
  add(b_idle);
  return sum;
}

ChainDistribution
reconstruct_distribution(const StationChainState &st, const BackoffParams &bo)
{
  const int m = bo.max_stage;
  const double p = st.p_eq;
  std::vector<double> head(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i < m; ++i)
    head[static_cast<std::size_t>(i)] = std::pow(p, i) * st.b00;
  head[static_cast<std::size_t>(m)] = std::pow(p, m) / (1.0 - p) * st.b00;

  double head_sum = 0.0;
  for (double v : head)
    head_sum += v;

  ChainDistribution out;
  out.b_idle = st.b_idle;
  out.b.resize(head.size());
  for (int i = 0; i <= m; ++i)
    {
      const int w = bo.window(i);
      double inflow;
      if (i == 0)
        {
          inflow = st.q * (1.0 - p) * head_sum + st.p_i0 * st.b_idle;
          if (m == 0)
            inflow += p * head[0];
        }
      else if (i < m)
        inflow = p * head[static_cast<std::size_t>(i - 1)];
      else
        inflow = p * (head[static_cast<std::size_t>(m - 1)] + head[static_cast<std::size_t>(m)]);
      auto &stage = out.b[static_cast<std::size_t>(i)];
      stage.resize(static_cast<std::size_t>(w));
      stage[0] = head[static_cast<std::size_t>(i)];
      for (int k = 1; k < w; ++k)
        stage[static_cast<std::size_t>(k)] = double(w - k) / w * inflow;
    }
  return out;
}

} // namespace markov
} // namespace dcf
