#pragma once

#define CMCLAB_VERSION "1.0.0"
