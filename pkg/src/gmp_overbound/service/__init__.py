"""HTTP service layer: FastAPI app plus pydantic schemas."""
