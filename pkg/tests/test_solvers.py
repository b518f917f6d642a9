# test_solvers

import asyncio


import pytest


from   schema    import *
from   solvers   import *


@pytest.mark.parametrize("params, solver_class", [
	(DeltaParams(lam=1.0, x0=0.2), DeltaSolver   ),
	(NonlocalParams(beta=2.0)    , NonlocalSolver),
	(LocalDDPParams(a=1.0, b=0.5), LocalDDPSolver),
])
def test_registry(params, solver_class):
	solver = create_solver(params)
	assert isinstance(solver, solver_class)
	result = solver.run(SolverExecutionContext(params, k=3))
	assert result.success
	assert len(result.spectrum.levels) == 3
	assert result.spectrum.model == solver.model


def test_unknown_params_rejected():
	with pytest.raises(ValueError):
		create_solver(OracleSpec())


def test_failure_is_reported_not_raised(monkeypatch):
	def broken(self, k):
		raise PoleError("landed on a pole", at=0.5)

	monkeypatch.setattr(DeltaSolver, "solve", broken)
	result = asyncio.run(create_solver(DeltaParams(lam=1.0)).execute(SolverExecutionContext(DeltaParams(lam=1.0))))
	assert not result.success
	assert result.spectrum is None
	assert result.error.startswith("PoleError")
