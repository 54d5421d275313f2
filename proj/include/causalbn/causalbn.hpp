#pragma once

#include "causalbn/bayesnet.hpp"
#include "causalbn/dataset.hpp"
#include "causalbn/ensemble.hpp"
#include "causalbn/error.hpp"
#include "causalbn/eval.hpp"
#include "causalbn/graph.hpp"
#include "causalbn/knowledge.hpp"
#include "causalbn/learners.hpp"
#include "causalbn/random.hpp"
#include "causalbn/scoring.hpp"
#include "causalbn/synth.hpp"
