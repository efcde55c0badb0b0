// Samples a field on a 64 x 64 box, computes the left-right crossing at
// gamma = 0.4 and prints its weight and length.
#include <cstdio>

#include "lfpp/fpp.hpp"
#include "lfpp/gff.hpp"

int main() {
  const lfpp::GridBox box = lfpp::GridBox::square(64);
  const lfpp::GaussianField field = lfpp::sample_dgff(box, 2024);
  const lfpp::WeightField wf(field, 0.4);
  const auto g = lfpp::crossing_weight(box, lfpp::CrossingSpec::lr(), wf);
  std::printf("Psi_LR = %.6f over %zu vertices\n", g.weight, g.path->size());
}
