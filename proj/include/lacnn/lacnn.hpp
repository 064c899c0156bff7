#pragma once

// Umbrella header for the whole library.

#include "lacnn/annotations.hpp"
#include "lacnn/csv.hpp"
#include "lacnn/errors.hpp"
#include "lacnn/experiment.hpp"
#include "lacnn/fsio.hpp"
#include "lacnn/image.hpp"
#include "lacnn/image_io.hpp"
#include "lacnn/kappa.hpp"
#include "lacnn/landmarks.hpp"
#include "lacnn/manifest.hpp"
#include "lacnn/nn/checkpoint.hpp"
#include "lacnn/nn/config.hpp"
#include "lacnn/nn/gradcheck.hpp"
#include "lacnn/nn/loss.hpp"
#include "lacnn/nn/network.hpp"
#include "lacnn/nn/tensor.hpp"
#include "lacnn/nn/train.hpp"
#include "lacnn/rng.hpp"
#include "lacnn/rotate.hpp"
#include "lacnn/samples.hpp"
#include "lacnn/split.hpp"
#include "lacnn/voronoi.hpp"
