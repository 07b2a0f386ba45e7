#ifndef PLANISO_PLANISO_HPP_
#define PLANISO_PLANISO_HPP_

#include "util.hpp"
#include "sexpr.hpp"
#include "pddl.hpp"
#include "ground.hpp"
#include "state_space.hpp"
#include "object_graph.hpp"
#include "canonical.hpp"
#include "wl.hpp"
#include "abstraction.hpp"
#include "conflicts.hpp"

namespace planiso {
inline const char* version() { return "0.1.0"; }
}

#endif // PLANISO_PLANISO_HPP_
