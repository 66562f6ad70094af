#pragma once
// Presentations shared across tests.

#include <string>

#include "tiltmut/dsl.hpp"

namespace fixtures {

// Seven vertices with one commutativity square 3 -> {4,5} -> 6.
inline const char* kExample1 = R"(quiver example1
vertices 1 2 3 4 5 6 7
arrow alpha : 1 -> 2
arrow beta : 2 -> 3
arrow gamma : 3 -> 4
arrow epsilon : 3 -> 5
arrow delta : 4 -> 6
arrow zeta : 5 -> 6
arrow eta : 6 -> 7
relation beta.alpha = 0
relation delta.gamma + zeta.epsilon = 0
relation eta.delta = 0
relation eta.zeta = 0
)";

// Expected cleaned result of mutating kExample1 at 3.
inline const char* kExample1Mutated = R"(quiver example1_mutated
vertices 1 2 3* 4 5 6 7
arrow alpha : 1 -> 2
arrow gb : 2 -> 4
arrow eb : 2 -> 5
arrow gs : 4 -> 3*
arrow es : 5 -> 3*
arrow bar : 3* -> 6
arrow eta : 6 -> 7
relation gb.alpha = 0
relation eb.alpha = 0
relation gs.gb + es.eb = 0
relation eta.bar = 0
)";

inline const char* kTwoCycle = R"(quiver two_cycle
vertices 1 2
arrow alpha : 1 -> 2
arrow beta : 2 -> 1
relation beta.alpha = 0
)";

inline tiltmut::Presentation load(const char* text) {
  return tiltmut::parse_quiver(text).body;
}

}  // namespace fixtures
