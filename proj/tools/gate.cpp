#include <iostream>

#include "pveq/oracle.hpp"

int main() {
  const pveq::GateReport g = pveq::run_reduction_gate();
  std::cout << "a-usc reduction gate: " << (g.passed ? "agree" : "DISAGREE") << " on " << g.sequences
            << " sequences\n";
  for (const auto& d : g.disagreements) std::cout << "  " << d << "\n";
  return g.passed ? 0 : 1;
}
