/* Smoke test for the C API: decide, verify, handle round-trip, reduce.
 *
 * Build (from the workspace root, after `cargo build -p lameq-ffi`):
 *   cc crates/ffi/examples/smoke.c -Icrates/ffi/include \
 *      -Ltarget/debug -llameq_ffi -lm -o smoke && LD_LIBRARY_PATH=target/debug ./smoke
 */
#include <stdio.h>
#include <string.h>
#include "lameq.h"

int main(void) {
    char *cert = NULL, *err = NULL;
    if (lameq_eq("f:i->i", "f", "\\y. f y", "i -> i", 10000, &cert, &err) != LAMEQ_STATUS_OK
        || cert == NULL) {
        fprintf(stderr, "eq failed: %s\n", err ? err : "?");
        return 1;
    }
    if (lameq_verify(cert, &err) != LAMEQ_STATUS_OK) return 2;

    LameqCert *handle = NULL;
    if (lameq_cert_parse(cert, &handle, &err) != LAMEQ_STATUS_OK) return 3;
    if (lameq_cert_verify(handle) != LAMEQ_STATUS_OK) return 4;
    char *json = NULL;
    if (lameq_cert_to_json(handle, &json) != LAMEQ_STATUS_OK) return 5;
    if (strcmp(json, cert) != 0) return 6;
    lameq_cert_free(handle);
    lameq_string_free(json);
    lameq_string_free(cert);

    char *out = NULL;
    if (lameq_whnf("z:i", "(\\x. x) z", 100, &out, &err) != LAMEQ_STATUS_OK) return 7;
    printf("%s\n", out);
    lameq_string_free(out);

    if (lameq_eq("", "\\x.\\y. x", "\\x.\\y. y", "i -> i -> i", 10000, NULL, &err)
        != LAMEQ_STATUS_NEGATIVE) {
        return 8;
    }
    puts("ok");
    return 0;
}
