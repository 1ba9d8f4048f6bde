#pragma once

// Convenience umbrella for the whole library.

#include "jsteg/adversarial_objectives.hpp"
#include "jsteg/coding_rate.hpp"
#include "jsteg/corpus.hpp"
#include "jsteg/cost_pipeline.hpp"
#include "jsteg/cost_sources.hpp"
#include "jsteg/embedding_sim.hpp"
#include "jsteg/grid.hpp"
#include "jsteg/gridfile.hpp"
#include "jsteg/jpeg_model.hpp"
#include "jsteg/parallel.hpp"
#include "jsteg/pgm.hpp"
#include "jsteg/pipeline.hpp"
#include "jsteg/rng.hpp"
#include "jsteg/sideinfo_est.hpp"
#include "jsteg/steg_eval.hpp"
