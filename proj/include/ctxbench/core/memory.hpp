/*
 * Copyright 2026 The ctxbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

namespace ctxbench {

// Keeps freed heap memory in the process instead of returning it to the kernel. Training
// allocates and frees the same tensors every step; with glibc defaults the heap top shrinks
// and regrows constantly and page faults can cost a third of the run time. Call once at the
// start of main, before any large allocation. No effect outside glibc.
void retain_freed_memory();

}  // namespace ctxbench
