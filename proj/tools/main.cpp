// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/cli/cli.hpp"

int main(int argc, char** argv)
{
    return mfmgcn::cli::dispatch(argc, argv);
}
