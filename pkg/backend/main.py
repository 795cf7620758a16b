"""FastAPI service for the mmWave coexistence simulator."""
import asyncio
import logging
from contextlib import asynccontextmanager
from typing import Dict, List

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse

from models import (
    CallFlowRequest, CallFlowTrace, MetricsRecord, NumerologyConfig, SlotDirection,
    SlotLayout, SnapshotRequest, SnapshotResponse, SweepConfig, SweepResponse,
)
from access import SCHEME_NAMES, run_snapshot, scheme_from_name
from deployment import generate_deployment, scenario_to_text
from montecarlo import mean_rate_active, records_to_csv, run_sweep, sum_rate
from slots import (
    MCOT_60GHZ_MS, build_slot_layout, busy_slots, numerology, simulate_call_flow,
    unoccupied_fraction,
)

logger = logging.getLogger(__name__)

# Server version - increment this when making changes
VERSION = "2.0.0"

app = FastAPI(title="mmWave Coexistence API", version=VERSION)

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Sweep results kept in process memory, keyed by run id
runs: Dict[str, SweepResponse] = {}
run_locks: Dict[str, asyncio.Lock] = {}
# Requests holding or waiting on each run lock
run_lock_users: Dict[str, int] = {}


def get_run_lock(run_id: str) -> asyncio.Lock:
    """Get or create a lock for a sweep run."""
    if run_id not in run_locks:
        run_locks[run_id] = asyncio.Lock()
    return run_locks[run_id]


@asynccontextmanager
async def hold_run_lock(run_id: str):
    """Hold the run's lock and drop it once no request needs it."""
    lock = get_run_lock(run_id)
    run_lock_users[run_id] = run_lock_users.get(run_id, 0) + 1
    try:
        async with lock:
            yield
    finally:
        run_lock_users[run_id] -= 1
        if not run_lock_users[run_id]:
            del run_lock_users[run_id]
            run_locks.pop(run_id, None)


def get_run(run_id: str) -> SweepResponse:
    if run_id not in runs:
        raise HTTPException(status_code=404, detail=f"Unknown run: {run_id}")
    return runs[run_id]


@app.get("/")
async def root():
    """Root endpoint."""
    return {"message": "mmWave Coexistence API is running", "docs": "/docs", "version": VERSION}


@app.get("/api/version")
async def get_version():
    """Get server version."""
    return {"version": VERSION}


@app.get("/api/schemes")
async def get_schemes():
    return {"schemes": SCHEME_NAMES}


@app.get("/api/numerology/{mu}", response_model=NumerologyConfig)
async def get_numerology(mu: int):
    """NR numerology row for mu."""
    try:
        return numerology(mu)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


@app.get("/api/slots/overhead")
async def get_overhead(mu: int = 3, mcot_ms: float = MCOT_60GHZ_MS, has_headers: bool = False):
    """Share of an MCOT left unoccupied by the DL handshake."""
    try:
        percent = unoccupied_fraction(mu, mcot_ms, has_headers)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {"mu": mu, "mcot_ms": mcot_ms, "has_headers": has_headers, "unoccupied_percent": percent}


@app.get("/api/slots/layout", response_model=SlotLayout)
async def get_layout(direction: SlotDirection = SlotDirection.DL, has_headers: bool = False):
    return build_slot_layout(direction, has_headers)


@app.post("/api/callflow", response_model=CallFlowTrace)
async def post_callflow(request: CallFlowRequest):
    """Run the RtoTx/RtoRx handshake over explicit busy slots."""
    layout = build_slot_layout(request.direction, request.has_headers)
    try:
        return simulate_call_flow(sorted(request.arrivals), busy_slots(request.busy_at_mt),
                                  busy_slots(request.busy_at_bs), layout)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


@app.post("/api/snapshot", response_model=SnapshotResponse)
async def post_snapshot(request: SnapshotRequest):
    """One random deployment evaluated under one access scheme."""
    try:
        scheme = scheme_from_name(request.scheme, request.threshold_omni_dbm, request.threshold_dir_dbm)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    scenario = generate_deployment(request.params, request.seed)
    result = run_snapshot(scenario, scheme)
    return SnapshotResponse(
        scenario_text=scenario_to_text(scenario),
        result=result,
        sum_rate_bps=sum_rate(result.rates),
        mean_rate_active_bps=mean_rate_active(result.rates),
    )


@app.post("/api/sweeps/{run_id}", response_model=SweepResponse)
async def post_sweep(run_id: str, config: SweepConfig):
    """Run a sweep in a worker thread and store it under run_id."""
    unknown = [name for name in config.schemes if name not in SCHEME_NAMES]
    if unknown:
        raise HTTPException(status_code=400, detail=f"Unknown schemes: {', '.join(unknown)}")
    async with hold_run_lock(run_id):
        logger.info("sweep %s: %s over %d values", run_id, config.sweep_variable.value,
                    len(config.sweep_values))
        records: List[MetricsRecord] = await asyncio.to_thread(run_sweep, config)
        runs[run_id] = SweepResponse(run_id=run_id, sweep_variable=config.sweep_variable,
                                     records=records)
        return runs[run_id]


@app.get("/api/sweeps/{run_id}", response_model=SweepResponse)
async def get_sweep(run_id: str):
    return get_run(run_id)


@app.get("/api/sweeps/{run_id}/csv", response_class=PlainTextResponse)
async def get_sweep_csv(run_id: str):
    """Stored sweep in the CSV schema written by the CLI."""
    run = get_run(run_id)
    return PlainTextResponse(records_to_csv(run.records, run.sweep_variable), media_type="text/csv")


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
