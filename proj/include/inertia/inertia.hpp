#pragma once

#include "inertia/augmentation.hpp"
#include "inertia/data/csv.hpp"
#include "inertia/data/series.hpp"
#include "inertia/data/synth.hpp"
#include "inertia/data/windowing.hpp"
#include "inertia/error.hpp"
#include "inertia/kernels/adam.hpp"
#include "inertia/kernels/layers.hpp"
#include "inertia/kernels/lstm.hpp"
#include "inertia/kernels/tape.hpp"
#include "inertia/kernels/tensor.hpp"
#include "inertia/losses.hpp"
#include "inertia/model.hpp"
#include "inertia/preprocessing.hpp"
#include "inertia/rng.hpp"
#include "inertia/runner/checkpoint.hpp"
#include "inertia/runner/config.hpp"
#include "inertia/runner/experiment.hpp"
#include "inertia/runner/report.hpp"
