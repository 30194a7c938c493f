#include <gtest/gtest.h>

#include "msaverify/error.hpp"
#include "msaverify/model.hpp"

using namespace msaverify;

namespace {

SystemModel two_services() {
  SystemModel m;
  m.microservices = {{"a", {0, 1}}, {"b", {2}}};
  m.endpoints = {{0, "GET", "/a", 0, {}}, {1, "POST", "/a", 0, {}}, {2, "GET", "/b", 1, {}}};
  m.edges = {{0, 2}, {2, 1}};
  return m;
}

bool has_issue(const ValidationReport& r, const std::string& code) {
  for (const auto& issue : r.issues) {
    if (issue.invariant == code) return true;
  }
  return false;
}

}  // namespace

TEST(Validate, AcceptsWellFormedModel) {
  const auto report = validate_model(two_services());
  EXPECT_TRUE(report.ok()) << report.summary();
  EXPECT_EQ(report.summary(), "OK");
}

TEST(Validate, ReportsEachBrokenInvariant) {
  {
    auto m = two_services();
    m.endpoints[2].parent = 5;
    EXPECT_TRUE(has_issue(validate_model(m), "parent-out-of-range"));
  }
  {
    auto m = two_services();
    m.edges.insert({0, 9});
    EXPECT_TRUE(has_issue(validate_model(m), "edge-out-of-range"));
  }
  {
    auto m = two_services();
    m.endpoints[1].method = "FETCH";
    EXPECT_TRUE(has_issue(validate_model(m), "bad-method"));
  }
  {
    auto m = two_services();
    m.endpoints[1].path = "/a";
    m.endpoints[1].method = "GET";
    EXPECT_TRUE(has_issue(validate_model(m), "duplicate-route"));
  }
  {
    auto m = two_services();
    m.microservices[1].name = "a";
    EXPECT_TRUE(has_issue(validate_model(m), "duplicate-service-name"));
  }
  {
    auto m = two_services();
    m.microservices[0].endpoint_indices.erase(1);
    EXPECT_TRUE(has_issue(validate_model(m), "unlisted-endpoint"));
  }
  {
    auto m = two_services();
    m.endpoints[0].permitted_roles = std::set<std::string>{"admin"};
    EXPECT_TRUE(has_issue(validate_model(m), "auth-partial"));
  }
  {
    auto m = two_services();
    m.version = 2;
    EXPECT_TRUE(has_issue(validate_model(m), "unsupported-version"));
  }
}

TEST(Validate, AuthReferencesMustBeDeclared) {
  auto m = two_services();
  m.auth = AuthExtension{{"admin"}, {"order"}, {{0, "invoice", {Operation::Read}}}};
  for (auto& e : m.endpoints) e.permitted_roles = std::set<std::string>{"admin"};
  m.endpoints[1].permitted_roles = std::set<std::string>{"guest"};
  const auto report = validate_model(m);
  EXPECT_TRUE(has_issue(report, "undeclared-role"));
  EXPECT_TRUE(has_issue(report, "undeclared-entity"));
}

TEST(Canonicalize, BuildsParentsAndSortedAdjacency) {
  const auto canon = canonicalize(two_services());
  EXPECT_EQ(canon.m(), 3u);
  EXPECT_EQ(canon.n(), 2u);
  EXPECT_EQ(std::vector<ServiceId>(canon.e_parents().begin(), canon.e_parents().end()),
            (std::vector<ServiceId>{0, 0, 1}));
  ASSERT_EQ(canon.edges().size(), 2u);
  EXPECT_EQ(canon.edges()[0], (Edge{0, 2}));
  EXPECT_EQ(canon.edges()[1], (Edge{2, 1}));
  EXPECT_TRUE(canon.has_edge(0, 2));
  EXPECT_FALSE(canon.has_edge(2, 0));
  EXPECT_EQ(canon.successors(2).size(), 1u);
  EXPECT_EQ(canon.predecessors(2)[0], 0u);
  EXPECT_EQ(canon.edge_position({2, 1}), 1u);
  EXPECT_FALSE(canon.edge_position({1, 2}).has_value());
  ASSERT_TRUE(canon.has_dense_view());
  const auto dense = canon.dense_matrix();
  EXPECT_TRUE(dense[0][2]);
  EXPECT_FALSE(dense[1][0]);
}

TEST(Canonicalize, IsDeterministic) {
  EXPECT_EQ(canonicalize(two_services()), canonicalize(two_services()));
}

TEST(Canonicalize, RejectsInvalidModel) {
  auto m = two_services();
  m.endpoints[0].parent = 7;
  EXPECT_THROW(canonicalize(m), ModelError);
}

TEST(Canonicalize, LargeModelSkipsDenseView) {
  SystemModel m;
  m.microservices = {{"big", {}}};
  for (std::size_t i = 0; i < CanonicalModel::kDenseThreshold + 1; ++i) {
    m.endpoints.push_back({i, "GET", "/x" + std::to_string(i), 0, {}});
    m.microservices[0].endpoint_indices.insert(i);
  }
  m.edges = {{0, 1}};
  const auto canon = canonicalize(m);
  EXPECT_FALSE(canon.has_dense_view());
  EXPECT_TRUE(canon.dense_matrix()[0][1]);
}

TEST(DegreeSum, CountsBothEndsAndSelfLoopsTwice) {
  auto m = two_services();
  m.edges.insert({0, 0});
  const auto canon = canonicalize(m);
  EXPECT_EQ(service_degree_sum(canon, 0), 4u);  // (0,2), (2,1), (0,0) twice
  EXPECT_EQ(service_degree_sum(canon, 1), 2u);
  EXPECT_EQ(service_degree_sums(canon), (std::vector<std::size_t>{4, 2}));
  EXPECT_THROW(service_degree_sum(canon, 2), std::out_of_range);
}

TEST(Lookup, FindsEndpointByRoute) {
  const auto m = two_services();
  EXPECT_EQ(find_endpoint(m, "POST", "/a"), 1u);
  EXPECT_FALSE(find_endpoint(m, "PUT", "/a").has_value());
  EXPECT_EQ(endpoint_label(m, 2), "E_2 (GET /b)");
}

TEST(Operations, RoundTripNames) {
  for (Operation op : kAllOperations) EXPECT_EQ(operation_from_string(to_string(op)), op);
  EXPECT_FALSE(operation_from_string("READS").has_value());
}
