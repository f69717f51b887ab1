import os


FIXTURES_DIR = os.getenv('WORKBENCH_FIXTURES_DIR',
                         os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                                      'fixtures'))
LOG_LEVEL = os.getenv('WORKBENCH_LOG_LEVEL', 'INFO')
CRP_WORKERS = int(os.getenv('WORKBENCH_CRP_WORKERS', 4))
D_GRID_POINTS = int(os.getenv('WORKBENCH_D_GRID_POINTS', 32))
BISECTION_XTOL = float(os.getenv('WORKBENCH_BISECTION_XTOL', 1e-14))
KKT_TOL = float(os.getenv('WORKBENCH_KKT_TOL', 1e-10))
REPORT_MAX_DENOMINATOR = int(os.getenv('WORKBENCH_REPORT_MAX_DENOMINATOR', 10 ** 12))
