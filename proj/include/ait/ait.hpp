#pragma once

#include "ait/codec.hpp"
#include "ait/deceiver.hpp"
#include "ait/digest.hpp"
#include "ait/dyadic.hpp"
#include "ait/enumerator.hpp"
#include "ait/error.hpp"
#include "ait/learning.hpp"
#include "ait/pm1.hpp"
#include "ait/sources.hpp"
#include "ait/table_io.hpp"
#include "ait/verdict.hpp"
#include "ait/verify.hpp"
