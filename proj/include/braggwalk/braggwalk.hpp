#pragma once

#include <braggwalk/analysis.hpp>
#include <braggwalk/beam.hpp>
#include <braggwalk/checkpoint.hpp>
#include <braggwalk/coin.hpp>
#include <braggwalk/config.hpp>
#include <braggwalk/engine.hpp>
#include <braggwalk/errors.hpp>
#include <braggwalk/geometry.hpp>
#include <braggwalk/io.hpp>
#include <braggwalk/path_sum.hpp>
#include <braggwalk/physics.hpp>
#include <braggwalk/walk.hpp>
