"""One test per acceptance criterion, with the tolerances pinned here."""

from expsum import suite


def check(report_criterion, r):
    report_criterion(r)
    assert r.passed, r.line()


def test_criterion_01_appendix_exact(report_criterion):
    check(report_criterion, suite.appendix_reproduction(max_seconds=10.0))


def test_criterion_02_weil_bound(report_criterion):
    check(report_criterion, suite.weil_bound(q_max=1009, max_seconds=5.0))


def test_criterion_03_parseval(report_criterion):
    check(report_criterion, suite.parseval(qs=(7, 101, 499, 997), rel_tol=1e-6))


def test_criterion_04_sigma1_dual_path(report_criterion):
    check(report_criterion, suite.sigma1_dual_path(qs=(7, 31, 101), factor=1e-6))


def test_criterion_05_complete_decomposition(report_criterion):
    check(report_criterion, suite.complete_decomposition(q=31, samples=50, factor=1e-6))


def test_criterion_06_square_root_cancellation(report_criterion):
    check(report_criterion, suite.sqrt_cancellation_regression(qs=(211, 499), growth=1.25, max_seconds=120.0))


def test_criterion_07_correlation_scan(report_criterion):
    check(report_criterion, suite.conjecture_regression(qs=(101, 199), growth=1.25, max_seconds=300.0))


def test_criterion_08_orthogonality(report_criterion):
    check(report_criterion, suite.orthogonality(qs=(5, 7, 11, 101), n_max=20, tol=1e-9))


def test_criterion_09_gauss_and_functional_equation(report_criterion):
    check(report_criterion, suite.gauss_and_functional_equation(q_max=101, tol_gauss=1e-9, tol_fe=1e-6))


def test_criterion_10_moment_decomposition(report_criterion):
    check(report_criterion, suite.moment_decomposition(qs=(5, 7, 13, 31, 61), tol=1e-3, cutoff_X=100.0,
                                                       max_seconds=180.0))


def test_criterion_11_voronoi(report_criterion):
    check(report_criterion, suite.voronoi(forms=("divisor", "tau"), ac=((1, 3), (2, 5), (3, 7)),
                                          Xs=(200, 500, 1000), tol=1e-6))


def test_criterion_12_hecke_deligne(report_criterion):
    check(report_criterion, suite.hecke_deligne(n_hecke=300, n_deligne=10 ** 5))


def test_criterion_13_bilinear_trivial(report_criterion):
    check(report_criterion, suite.bilinear_trivial(q=997, M=31, N=31, instances=100, rel_tol=1e-7, constant=2.0))


def test_criterion_14_shifted_shape(report_criterion):
    check(report_criterion, suite.shifted_regression(cases=((101, 64, 64), (211, 64, 64)), growth=1.25))
