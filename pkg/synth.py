from gravrec.script import synth

if __name__ == "__main__":
    synth.main()
