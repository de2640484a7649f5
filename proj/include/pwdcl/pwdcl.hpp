#pragma once

#include "pwdcl/beamform.hpp"
#include "pwdcl/binary.hpp"
#include "pwdcl/config.hpp"
#include "pwdcl/core.hpp"
#include "pwdcl/errors.hpp"
#include "pwdcl/formats.hpp"
#include "pwdcl/net.hpp"
#include "pwdcl/quality.hpp"
#include "pwdcl/random.hpp"
#include "pwdcl/simfield.hpp"
#include "pwdcl/train.hpp"
