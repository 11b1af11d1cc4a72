#ifndef SMOOTHPO_SMOOTHPO_HPP
#define SMOOTHPO_SMOOTHPO_HPP

#include "smoothpo/bounds.hpp"
#include "smoothpo/densities.hpp"
#include "smoothpo/epsilon.hpp"
#include "smoothpo/experiments.hpp"
#include "smoothpo/generators.hpp"
#include "smoothpo/io.hpp"
#include "smoothpo/model.hpp"
#include "smoothpo/pareto.hpp"
#include "smoothpo/rank.hpp"
#include "smoothpo/rng.hpp"
#include "smoothpo/solution.hpp"
#include "smoothpo/solution_set.hpp"
#include "smoothpo/witness.hpp"
#include "smoothpo/witness_zp.hpp"

#endif  // SMOOTHPO_SMOOTHPO_HPP
