"""Console helpers, bundled defaults and report serialization"""
