"""quditsinglet engine: qudit states, permutation Hamiltonians, measurements and reports"""
