#include <math.h>
#include <stdio.h>
#include <string.h>

#include "rtprof.h"

#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      return 1;                                                  \
    }                                                            \
  } while (0)

int main(void) {
  size_t edges[] = {0, 1};
  RtGraph *g = NULL;
  CHECK(rtprof_graph_new(2, edges, 1, &g) == RT_STATUS_OK);
  double h2 = 0.0;
  CHECK(rtprof_h2(g, &h2) == RT_STATUS_OK);
  CHECK(fabs(h2 - sqrt(2.0)) < 1e-12);
  rtprof_graph_free(g);

  RtBudget tiny = {10, 10};
  RtGraph *rt = NULL;
  CHECK(rtprof_round_tree_build(2, 2, 3, &tiny, &rt) == RT_STATUS_BUDGET);
  CHECK(rt == NULL);
  CHECK(strstr(rtprof_last_error(), "budget") != NULL);
  CHECK(rtprof_round_tree_build(2, 2, 3, NULL, &rt) == RT_STATUS_OK);
  CHECK(rtprof_graph_vertex_count(rt) == 85);
  rtprof_graph_free(rt);

  RtYk *yk = NULL;
  RtCertificate *cert = NULL;
  CHECK(rtprof_yk_build(2, 2, 1.0, 1, NULL, &yk) == RT_STATUS_OK);
  CHECK(rtprof_certify_yk(yk, 1.0, NULL, &cert) == RT_STATUS_OK);
  CHECK(rtprof_certificate_bound(cert) > 0.0);
  char *json = NULL;
  CHECK(rtprof_certificate_to_json(cert, &json) == RT_STATUS_OK);
  CHECK(strstr(json, "\"bound\"") != NULL);
  rtprof_string_free(json);
  rtprof_certificate_free(cert);
  rtprof_yk_free(yk);
  printf("ok\n");
  return 0;
}
