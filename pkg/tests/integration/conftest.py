import pytest

from src.common.config import ProblemConfig
from src.branch.continuation import continue_branch
from src.discretization import assemble_biharmonic, build_mesh


class BranchCache:
    """Continuation results shared by the acceptance modules of one session."""

    def __init__(self):
        self._results = {}

    def get(self, n, M, p=1.0):
        key = (n, M, p)
        if key not in self._results:
            config = ProblemConfig(n=n, M=M, p=p)
            op = assemble_biharmonic(build_mesh(M), n)
            self._results[key] = continue_branch(op, config, run_id=f"acceptance_n{n}_M{M}")
        return self._results[key]

@pytest.fixture(scope="session")
def branches():
    return BranchCache()
