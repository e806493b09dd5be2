#pragma once

#include "pisos/opvar.hpp"
#include "pisos/program.hpp"
#include "pisos/sdp.hpp"

namespace pisos {

// Default coercivity margin: strict inequalities P > 0 are imposed as
// P = P0 + eps I with P0 >= 0.
inline constexpr double kDefaultEps = 1e-4;

// Each executive has a build_* form that returns the unsolved program (used
// for SDPA export) and an exec_* form that solves it.

// Lyapunov test: find P > 0 with A* P H + H* P A <= 0.
struct StabilityProgram {
  Program program;
  OpVar P;  // eps-shifted
};
StabilityProgram build_stability(const OpVar& H, const OpVar& A,
                                 DegreeSpec deg, double eps = kDefaultEps);

struct StabilityResult {
  SolveReport report;
  bool feasible = false;
  OpVar P;  // numeric when feasible
};
StabilityResult exec_stability(const OpVar& H, const OpVar& A, DegreeSpec deg,
                               double eps = kDefaultEps,
                               const SdpOptions& options = {});

// L2-gain bound from w to z for H x' = A x + B w, z = C x + D w:
// minimize gamma subject to
//   [ -gamma I   D*        B* P H        ]
//   [  D        -gamma I   C             ]  <= 0,  P > 0.
//   [  H* P B    C*        A* P H + H* P A ]
struct GainProgram {
  Program program;
  DecisionVarId gamma;
  OpVar P;
};
GainProgram build_hinf_gain(const OpVar& H, const OpVar& A, const OpVar& B,
                            const OpVar& C, const OpVar& D, DegreeSpec deg,
                            double eps = kDefaultEps);

struct GainResult {
  SolveReport report;
  double gamma = 0.0;
  OpVar P;
};
GainResult exec_hinf_gain(const OpVar& H, const OpVar& A, const OpVar& B,
                          const OpVar& C, const OpVar& D, DegreeSpec deg,
                          double eps = kDefaultEps,
                          const SdpOptions& options = {});

// Estimator feasibility at a fixed gamma for
//   H x' = A x + B w,  z = C1 x + D11 w,  y = C2 x + D21 w:
// find P > 0 and Z (finite-dimensional range of y into the state space)
// with
//   [ -gamma I   -D11*      T                       ]
//   [ -D11       -gamma I   C1                      ]  <= 0,
//   [  T*         C1*       (PA+ZC2)* H + H* (PA+ZC2) ]
// where T = -(P B + Z D21)* H.
struct EstimatorProgram {
  Program program;
  OpVar P;
  OpVar Z;
};
EstimatorProgram build_hinf_estimator(const OpVar& H, const OpVar& A,
                                      const OpVar& B, const OpVar& C1,
                                      const OpVar& C2, const OpVar& D11,
                                      const OpVar& D21, double gamma,
                                      DegreeSpec deg, double eps = kDefaultEps);

struct EstimatorResult {
  SolveReport report;
  bool feasible = false;
  OpVar P;
  OpVar Z;
};
EstimatorResult exec_hinf_estimator(const OpVar& H, const OpVar& A,
                                    const OpVar& B, const OpVar& C1,
                                    const OpVar& C2, const OpVar& D11,
                                    const OpVar& D21, double gamma,
                                    DegreeSpec deg, double eps = kDefaultEps,
                                    const SdpOptions& options = {});

}  // namespace pisos
