#pragma once
// OpenAI-compatible HTTP backend: /v1/chat/completions and /v1/embeddings.
// Retries timeouts/5xx/429 with exponential backoff; an internal semaphore
// caps in-flight requests.

#include "uprof/backend.hpp"

namespace uprof {

// Reads UPROF_BASE_URL / UPROF_API_KEY / UPROF_MODEL when fields are unset.
BackendDescriptor http_descriptor_from_env(BackendDescriptor base = {});

BackendPtr make_http_backend(BackendDescriptor desc);

// "mock:script.json" or "http:http://host:port" (empty url -> env).
// Mock scripts are loaded from JSON via serde.
BackendPtr make_backend_from_spec(const std::string& spec, const std::string& model_name);

} // namespace uprof
