#pragma once

#include "cdisim/config.hpp"
#include "cdisim/design.hpp"
#include "cdisim/detection.hpp"
#include "cdisim/errors.hpp"
#include "cdisim/fft.hpp"
#include "cdisim/grating.hpp"
#include "cdisim/interferogram.hpp"
#include "cdisim/interferometry.hpp"
#include "cdisim/io.hpp"
#include "cdisim/material.hpp"
#include "cdisim/parallel.hpp"
#include "cdisim/qpm.hpp"
#include "cdisim/rng.hpp"
#include "cdisim/runner.hpp"
#include "cdisim/scan.hpp"
#include "cdisim/sources.hpp"
#include "cdisim/spectrum.hpp"
#include "cdisim/units.hpp"
