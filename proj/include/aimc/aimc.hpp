#pragma once

#include "aimc/codes.hpp"
#include "aimc/config.hpp"
#include "aimc/container.hpp"
#include "aimc/dataset.hpp"
#include "aimc/errors.hpp"
#include "aimc/eval.hpp"
#include "aimc/image.hpp"
#include "aimc/image_io.hpp"
#include "aimc/noise.hpp"
#include "aimc/oracle.hpp"
#include "aimc/rng.hpp"
#include "aimc/synth.hpp"
#include "aimc/taxonomy.hpp"
#include "aimc/tfr.hpp"
