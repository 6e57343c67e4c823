#include <math.h>
#include <stdio.h>
#include "pco.h"

static int fail(const char *what, int32_t code) {
    char msg[256];
    pco_last_error(msg, sizeof msg);
    fprintf(stderr, "%s: code %d: %s\n", what, code, msg);
    return 1;
}

int main(void) {
    size_t src[] = {0, 1, 2};
    size_t dst[] = {1, 2, 0};
    PcoTopology *topo = NULL;
    int32_t rc = pco_topology_new(3, src, dst, NULL, 3, &topo);
    if (rc != PCO_OK) return fail("topology", rc);

    size_t cliques = 0;
    pco_topology_clique_count(topo, &cliques);
    if (cliques != 1) return fail("clique count", -1);

    PcoSyncResult sync;
    rc = pco_sync_run(topo, 0.1, NAN, 10000.0, 3, NULL, &sync, NULL, 0);
    if (rc != PCO_OK || !sync.converged) return fail("sync", rc);

    PcoRatio demands[] = {{1, 1}, {1, 1}, {1, 1}};
    PcoRatio delta = {1, 1};
    double gamma[3];
    PcoSchedResult sched;
    rc = pco_sched_run(topo, 0.5, delta, demands, 20000, 1, &sched, gamma, 3);
    if (rc != PCO_OK || !sched.converged) return fail("sched", rc);
    for (int i = 0; i < 3; i++)
        if (fabs(gamma[i] - 1.0 / 6.0) > 1e-6) return fail("gamma", -1);

    pco_topology_free(topo);
    rc = pco_topology_new(2, src, dst, NULL, 3, &topo);
    if (rc != PCO_ERR_TOPOLOGY) return fail("expected topology error", rc);
    puts("ok");
    return 0;
}
