#include "reachgrid/hji.hpp"

namespace reachgrid {

// The solver is a header template; keep the concrete game instantiations in
// one translation unit so client code links against compiled sweeps.
template BrtResult solve_brt<Interval1DGame>(const ValueField&, Interval1DGame,
                                             const SolverConfig&);
template BrtResult solve_brt<ReducedCarGame>(const ValueField&, ReducedCarGame,
                                             const SolverConfig&);
template BrtResult solve_brt<RelativeCarGame>(const ValueField&, RelativeCarGame,
                                              const SolverConfig&);
template BrtResult solve_brt<CurbGame>(const ValueField&, CurbGame, const SolverConfig&);

}  // namespace reachgrid
