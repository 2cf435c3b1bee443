#pragma once

#include "dimac/channel.hpp"
#include "dimac/channel_io.hpp"
#include "dimac/codec.hpp"
#include "dimac/confusability.hpp"
#include "dimac/prob.hpp"
#include "dimac/regions.hpp"
#include "dimac/rng.hpp"
#include "dimac/types.hpp"
