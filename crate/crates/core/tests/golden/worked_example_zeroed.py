from dwave.system import DWaveSampler, EmbeddingComposite
sampler_auto = EmbeddingComposite(DWaveSampler(solver={'qpu': True}))

linear = {('q1','q1'): 26.0, ('q2','q2'): 72.0, ('q3','q3'): -6.0, ('q4','q4'): 8.0, ('q5','q5'): -13.0, ('q6','q6'): -16.0, ('q7','q7'): 23.0, ('q8','q8'): 56.0}

quadratic = {('q1','q2'): 40.0, ('q1','q5'): 2.0, ('q1','q6'): 4.0, ('q1','q7'): -2.0, ('q1','q8'): -4.0, ('q2','q5'): 4.0, ('q2','q6'): 8.0, ('q2','q7'): -4.0, ('q2','q8'): -8.0, ('q3','q4'): 40.0, ('q3','q5'): -2.0, ('q3','q6'): -4.0, ('q3','q7'): 2.0, ('q3','q8'): 4.0, ('q4','q5'): -4.0, ('q4','q6'): -8.0, ('q4','q7'): 4.0, ('q4','q8'): 8.0, ('q5','q6'): 20.0, ('q7','q8'): 20.0}

Q = dict(linear)
Q.update(quadratic)

sampleset = sampler_auto.sample_qubo(Q, num_reads=1000)
print(sampleset)
