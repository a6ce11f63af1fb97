#pragma once

#include <stdexcept>
#include <string>

namespace spreadopt {

/// Base class of every domain error thrown by this library. Anything else
/// escaping the public API (std::bad_alloc aside) is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Volatility inputs violate sigma1 > 0, sigma2 > 0, |rho| < 1.
struct DegenerateVolatility : Error {
  using Error::Error;
};

/// Drift inputs violate alpha1 < c*alpha2, i.e. the spread mean-reversion
/// rate kappa = c*alpha2 - alpha1 would be <= 0.
struct NonMeanReverting : Error {
  using Error::Error;
};

/// Scalar argument outside an operation's mathematical domain
/// (invalid Riccati coefficients, non-positive log argument, bad grid...).
struct DomainError : Error {
  using Error::Error;
};

/// Time argument at or beyond the finite escape time of the Riccati solution.
struct EscapeTimeExceeded : Error {
  using Error::Error;
};

/// Requested horizon reaches the critical horizon: the expected-utility
/// problem blows up and no finite solution exists.
struct IllPosedHorizon : Error {
  double gamma;
  double gamma0;
  double t_n;
  IllPosedHorizon(double gamma_, double gamma0_, double t_n_)
      : Error("ill-posed horizon: gamma " + std::to_string(gamma_) +
              " is below the critical risk aversion " + std::to_string(gamma0_) +
              " and the horizon reaches the critical horizon T_N = " +
              std::to_string(t_n_)),
        gamma(gamma_),
        gamma0(gamma0_),
        t_n(t_n_) {}
};

/// Wealth argument must be strictly positive.
struct NonPositiveWealth : Error {
  using Error::Error;
};

/// Operation requires the market-neutrality condition to hold and it does not.
struct ConditionViolated : Error {
  using Error::Error;
};

/// Operation is defined on [0, T) and was evaluated at exactly t = T.
struct TerminalTime : Error {
  using Error::Error;
};

/// Parameter set is not in the ill-posed regime (gamma >= gamma0), so there
/// is no finite critical horizon to sweep toward.
struct NotIllPosed : Error {
  using Error::Error;
};

/// A strategy returned a NaN or infinite portfolio weight during simulation.
struct NonFiniteWeight : Error {
  using Error::Error;
};

/// Finite-difference self-consistency check failed: the requested grid is too
/// coarse for the requested problem.
struct GridTooCoarse : Error {
  using Error::Error;
};

/// Unreadable, malformed or incomplete input file; the message carries the
/// file name and, for parse failures, the line and column.
struct InputError : Error {
  using Error::Error;
};

}  // namespace spreadopt
