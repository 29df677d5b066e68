import logging
from contextlib import asynccontextmanager
from typing import Optional

import numpy as np
from dotenv import load_dotenv
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from app.domain.dirichlet import compute_domain
from app.domain.simplicity import simplicity_check
from app.errors import HyperLabError, NotConverged
from app.groups.diagnostics import classify_generators
from app.models.configuration import LabConfig, load_lab_config
from app.models.models import ClassifyRequest, ClassifyResponse, DomainRequest, Example2Request
from app.models.reports import DomainReport, Example2Report, ScanReport
from app.paperlab import Example1Config, example1_scan, example2_verify
from app.schema.validation import build_group

load_dotenv()

logger = logging.getLogger(__name__)

VERSION = '0.1.0'

# Loaded once at startup
lab_config: Optional[LabConfig] = None


@asynccontextmanager
async def lifespan(app: FastAPI):
    """
    Context manager to handle the startup and shutdown of the app
    """
    global lab_config
    lab_config = load_lab_config()
    logger.info(f"Loaded configuration '{lab_config.name}'")

    yield

    lab_config = None


# Create FastAPI app
app = FastAPI(
    title='Hyperbolic Dirichlet Lab API',
    description='Dirichlet domains, bisector genericity and simplicity checks in the hyperboloid model',
    version=VERSION,
    lifespan=lifespan
)

# Add CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=['*'],  # Adjust in production
    allow_credentials=True,
    allow_methods=['*'],
    allow_headers=['*'],
)


def _config() -> LabConfig:
    if lab_config is None:
        raise HTTPException(status_code=503, detail='Configuration not loaded')
    return lab_config


def _http_error(e: Exception, action: str) -> HTTPException:
    """Map lab errors onto status codes: 409 not converged, 422 invalid input, 500 otherwise."""
    if isinstance(e, NotConverged):
        return HTTPException(status_code=409, detail=f'Not converged while {action}: {str(e)}')
    if isinstance(e, (HyperLabError, ValueError)):
        return HTTPException(status_code=422, detail=f'Invalid input while {action}: {str(e)}')
    logger.error(f"Error {action}: {str(e)}", exc_info=True)
    return HTTPException(status_code=500, detail=f'Error {action}: {str(e)}')


def _domain(request: DomainRequest, config: LabConfig):
    G = build_group(request.group, config.tolerances.validation)
    base = request.base or request.group.base
    if base is None:
        base = np.eye(G.size)[0]
    kwargs = config.domain_kwargs()
    if request.len_max is not None:
        kwargs.update(len_max=request.len_max, len_start=min(kwargs['len_start'], request.len_max))
    return G, compute_domain(G, base, **kwargs)


@app.get('/')
async def root():
    return {'message': 'Hyperbolic Dirichlet Lab API', 'version': VERSION}


@app.post('/classify', response_model=ClassifyResponse)
def classify_group(request: ClassifyRequest):
    """Classify the generators of a group."""
    config = _config()
    try:
        G = build_group(request.group, config.tolerances.validation)
        return classify_generators(G, config.tolerances.linear)
    except Exception as e:
        raise _http_error(e, 'classifying generators')


@app.post('/domain', response_model=DomainReport)
def dirichlet_domain(request: DomainRequest):
    """Compute a Dirichlet domain; an unconverged domain is a 409."""
    config = _config()
    try:
        _, D = _domain(request, config)
        if not D.converged:
            raise NotConverged(f"Domain not stable by word length {D.convergence.word_length}")
        return D.to_report()
    except Exception as e:
        raise _http_error(e, 'computing domain')


@app.post('/simplicity', response_model=DomainReport)
def domain_simplicity(request: DomainRequest):
    config = _config()
    try:
        G, D = _domain(request, config)
        report = D.to_report()
        report.simplicity = simplicity_check(D, G, incidence_tol=config.tolerances.incidence,
                                             tol=config.tolerances.linear)
        return report
    except Exception as e:
        raise _http_error(e, 'checking simplicity')


@app.post('/example1', response_model=ScanReport)
def example1(request: Example1Config):
    config = _config()
    try:
        return example1_scan(request.lam, request.budget, request.seed, klein_radius=config.scans.klein_radius,
                             tol=config.tolerances.rank)
    except Exception as e:
        raise _http_error(e, 'scanning example 1')


@app.post('/example2', response_model=Example2Report)
def example2(request: Example2Request):
    config = _config()
    try:
        return example2_verify(request.t, request.base, incidence_tol=config.tolerances.incidence)
    except Exception as e:
        raise _http_error(e, 'verifying example 2')


if __name__ == '__main__':
    import uvicorn
    uvicorn.run('app.main:app', host='0.0.0.0', port=8000, reload=True)
