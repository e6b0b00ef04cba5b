#pragma once

#define REMEST_VERSION "0.1.0"
