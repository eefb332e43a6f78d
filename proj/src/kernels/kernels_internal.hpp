// Copyright 2026 The skysum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "skysum/kernels.hpp"

namespace skysum::kernels::detail {

const KernelTable& scalar_table() noexcept;
#if defined(SKYSUM_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(SKYSUM_HAVE_NEON_KERNELS)
const KernelTable& neon_table() noexcept;
#endif

}  // namespace skysum::kernels::detail
