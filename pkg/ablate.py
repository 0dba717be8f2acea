from gravrec.script import ablate

if __name__ == "__main__":
    ablate.main()
